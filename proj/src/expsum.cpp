#include "tsolve/expsum.hpp"

#include "tsolve/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsolve {

using std::numbers::pi;

std::size_t ExpSum::active_terms() const
{
    return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(),
                                                  [](double w) { return w > 0; }));
}

double t_r(int r) { return std::exp(pi * std::sqrt(double(r))) / 8.0; }
double clip_threshold(int r) { return 1.0 / t_r(r); }
double best_bound(int r, double beta) { return 16.0 / beta * std::exp(-pi * std::sqrt(double(r))); }
double clip_degradation(int r) { return 8.0 * r * std::numbers::e * std::exp(-pi * std::sqrt(double(r))); }

double eval(const ExpSum& s, double x)
{
    if (!(x > 0)) throw DomainError("expsum eval: x must be positive");
    double acc = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.weights[k] > 0) acc += s.weights[k] * std::exp(-s.nodes[k] * x);
    return acc;
}

SupScan measure_sup_error(const ExpSum& s, std::size_t points, double decades)
{
    SupScan out;
    const double l0 = std::log(s.beta);
    const double step = decades * std::log(10.0) / double(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        double x = std::exp(l0 + step * double(i));
        double e = std::abs(eval(s, x) - 1.0 / x);
        if (e > out.sup_error) {
            out.sup_error = e;
            out.argmax = x;
        }
    }
    double X = s.beta * std::pow(10.0, decades);
    out.tail_bound = std::max(1.0 / X, eval(s, X));
    return out;
}

double max_x_times_s(const ExpSum& s, double x_lo, double x_hi, std::size_t points)
{
    double m = 0;
    const double l0 = std::log(x_lo), l1 = std::log(x_hi);
    for (std::size_t i = 0; i < points; ++i) {
        double x = std::exp(l0 + (l1 - l0) * double(i) / double(points - 1));
        m = std::max(m, x * eval(s, x));
    }
    return m;
}

namespace {

// Upper end of the domination scan: past 60/a_min every term is negligible
// and x*S(x) is decreasing.
double domination_scan_end(const ExpSum& s, double T)
{
    double amin = *std::min_element(s.nodes.begin(), s.nodes.end());
    return std::max(1e4 * T, 60.0 / amin);
}

void enforce_domination(ExpSum& s)
{
    double T = t_r(s.r_nominal);
    double hi = domination_scan_end(s, T);
    std::size_t pts = std::size_t(1000 * std::max(1.0, std::log10(hi / T))) + 1;
    double m = max_x_times_s(s, T, hi, pts);
    if (m >= 1.0 - 1e-9) {
        double f = (1.0 - 1e-6) / m;
        for (auto& w : s.weights) w *= f;
    }
}

// Node spacing h solves (r-1)h = log(pi^2/h) + pi^2/h, balancing truncation
// at both ends against the discretization error exp(-pi^2/h).
ExpSum sinc_sum(int r)
{
    ExpSum s;
    s.r_nominal = r;
    if (r == 1) {
        s.nodes = {1.0};
        s.weights = {std::numbers::e};
        return s;
    }
    auto g = [r](double h) { return (r - 1) * h - std::log(pi * pi / h) - pi * pi / h; };
    double lo = 1e-3, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    double h = 0.5 * (lo + hi);
    double s0 = -pi * pi / h;
    for (int k = 0; k < r; ++k) {
        double a = std::exp(s0 + k * h);
        s.nodes.push_back(a);
        s.weights.push_back(h * a);
    }
    return s;
}

// Levenberg-Marquardt on (log a, log w) with Lawson-type reweighting toward
// the minimax solution.
bool polish_lm(ExpSum& s, int iters)
{
    const int r = int(s.size());
    const int np = 4000;
    Eigen::VectorXd xs(np);
    for (int i = 0; i < np; ++i) xs[i] = std::pow(10.0, 8.0 * i / (np - 1));

    Eigen::VectorXd p(2 * r);
    for (int k = 0; k < r; ++k) {
        p[k] = std::log(s.nodes[k]);
        p[r + k] = std::log(s.weights[k]);
    }
    auto resid = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd e(np);
        for (int i = 0; i < np; ++i) {
            double acc = 0;
            for (int k = 0; k < r; ++k) acc += std::exp(q[r + k] - std::exp(q[k]) * xs[i]);
            e[i] = acc - 1.0 / xs[i];
        }
        return e;
    };
    Eigen::VectorXd wts = Eigen::VectorXd::Constant(np, 1.0 / np);
    Eigen::VectorXd e = resid(p);
    Eigen::VectorXd best = p;
    double best_err = e.cwiseAbs().maxCoeff();
    double lam = 1e-3;
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd J(np, 2 * r);
        for (int i = 0; i < np; ++i)
            for (int k = 0; k < r; ++k) {
                double a = std::exp(p[k]);
                double t = std::exp(p[r + k] - a * xs[i]);
                J(i, k) = -t * a * xs[i];
                J(i, r + k) = t;
            }
        Eigen::VectorXd sw = wts.cwiseSqrt();
        Eigen::MatrixXd A = sw.asDiagonal() * J;
        Eigen::VectorXd b = -(sw.asDiagonal() * e);
        Eigen::MatrixXd H = A.transpose() * A;
        Eigen::VectorXd gr = A.transpose() * b;
        double cur = (wts.array() * e.array().square()).sum();
        for (int tries = 0; tries < 20; ++tries) {
            Eigen::MatrixXd Hd = H;
            Hd.diagonal().array() += lam * (H.diagonal().array() + 1e-300);
            Eigen::VectorXd dp = Hd.ldlt().solve(gr);
            Eigen::VectorXd pn = p + dp;
            Eigen::VectorXd en = resid(pn);
            if (en.allFinite() && (wts.array() * en.array().square()).sum() < cur) {
                p = pn;
                e = en;
                lam *= 0.3;
                break;
            }
            lam *= 10;
        }
        double m = e.cwiseAbs().maxCoeff();
        if (m < best_err) {
            best_err = m;
            best = p;
        }
        wts = (wts.array() * e.array().abs()).matrix();
        wts /= wts.sum();
        wts = wts.cwiseMax(1e-12);
    }
    if (!best.allFinite()) return false;
    for (int k = 0; k < r; ++k) {
        s.nodes[k] = std::exp(best[k]);
        s.weights[k] = std::exp(best[r + k]);
    }
    return true;
}

void sort_by_node(ExpSum& s)
{
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.nodes[a] < s.nodes[b]; });
    ExpSum t = s;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        t.nodes[i] = s.nodes[idx[i]];
        t.weights[i] = s.weights[idx[i]];
    }
    s.nodes.swap(t.nodes);
    s.weights.swap(t.weights);
}

} // namespace

ExpSum build_expsum(int r, bool polish)
{
    if (r < 1) throw ConstructionError("build_expsum: r must be >= 1 (got " + std::to_string(r) + ")");
    ExpSum s = sinc_sum(r);
    enforce_domination(s);
    SupScan scan = measure_sup_error(s);
    s.measured_sup_error = scan.sup_error;
    s.tail_bound = scan.tail_bound;

    if (polish && r >= 2) {
        ExpSum p = s;
        if (polish_lm(p, 60)) {
            sort_by_node(p);
            enforce_domination(p);
            SupScan ps = measure_sup_error(p);
            if (!std::isfinite(ps.sup_error))
                throw ConstructionError("build_expsum: polish diverged at r = " + std::to_string(r));
            if (ps.sup_error < s.measured_sup_error) {
                p.measured_sup_error = ps.sup_error;
                p.tail_bound = ps.tail_bound;
                p.polished = true;
                s = p;
            }
        }
    }
    for (std::size_t k = 0; k < s.size(); ++k)
        if (!std::isfinite(s.nodes[k]) || !std::isfinite(s.weights[k]) || s.nodes[k] <= 0)
            throw ConstructionError("build_expsum: non-finite parameters at r = " + std::to_string(r));
    return s;
}

ExpSum rescale(const ExpSum& s, double beta)
{
    if (!(beta > 0)) throw DomainError("rescale: beta must be positive");
    ExpSum out = s;
    for (auto& a : out.nodes) a /= beta;
    for (auto& w : out.weights) w /= beta;
    out.beta = s.beta * beta;
    out.measured_sup_error = s.measured_sup_error / beta;
    out.tail_bound = s.tail_bound / beta;
    return out;
}

// Threshold is applied to beta-normalized nodes so clip and rescale commute.
ExpSum clip(const ExpSum& s)
{
    ExpSum out = s;
    const double thr = clip_threshold(s.r_nominal);
    for (std::size_t k = 0; k < out.size(); ++k)
        if (out.nodes[k] * out.beta < thr) out.weights[k] = 0.0;
    out.clipped = true;
    SupScan sc = measure_sup_error(out);
    out.measured_sup_error = sc.sup_error;
    out.tail_bound = sc.tail_bound;
    return out;
}

} // namespace tsolve
