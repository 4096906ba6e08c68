#include "tsolve/validation.hpp"

#include "tsolve/contour_quad.hpp"
#include "tsolve/errors.hpp"
#include "tsolve/expsum.hpp"
#include "tsolve/resolvent_solver.hpp"
#include "tsolve/spectral_pipeline.hpp"
#include "tsolve/tensor_format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace tsolve {

using std::numbers::pi;

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
    Clock::time_point t0 = Clock::now();
    double seconds() const { return std::chrono::duration<double>(Clock::now() - t0).count(); }
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

SparseVec random_factor(std::mt19937_64& rng, int modes)
{
    std::normal_distribution<double> nd;
    std::vector<double> c(modes);
    for (auto& x : c) x = nd(rng);
    return SparseVec::dense(c);
}

RankOneTerm random_rank_one(std::mt19937_64& rng, int d, int modes)
{
    std::vector<SparseVec> f;
    for (int j = 0; j < d; ++j) f.push_back(random_factor(rng, modes));
    return RankOneTerm::eigen(std::move(f));
}

TensorSum random_tensor(std::mt19937_64& rng, int d, int modes, int rank)
{
    TensorSum s;
    for (int k = 0; k < rank; ++k) s.push(random_rank_one(rng, d, modes));
    return s;
}

CriterionResult finish(CriterionResult r, const Timer& t)
{
    r.seconds = t.seconds();
    if (r.seconds > r.time_limit) {
        r.pass = false;
        r.detail += "; runtime " + fmt(r.seconds) + " s over limit " + fmt(r.time_limit) + " s";
    }
    return r;
}

const std::vector<int> kRset = {4, 9, 16, 25, 36, 49};

} // namespace

ExactProblem poly_bump_problem(int d, int modes)
{
    ExactProblem ex;
    ex.op = laplacian_operator(d, std::max(modes, 128));
    std::vector<double> c(modes, 0.0);
    for (int k = 1; k <= modes; k += 2) c[k - 1] = 4 * std::sqrt(2.0) / std::pow(k * pi, 3);
    std::vector<SparseVec> fac(d, SparseVec::dense(c));
    ex.f.push(RankOneTerm::eigen(fac));
    ex.functions.push_back(std::vector<std::function<double(double)>>(d, [](double x) { return x * (1 - x); }));
    return ex;
}

TensorSum nodal_data_on_scheme_mesh(const ExactProblem& ex, double eps, const SchemeParameters& p)
{
    TensorSum g;
    for (const auto& term : ex.functions) {
        std::vector<GridFunction> fac;
        for (int j = 0; j < ex.op.d(); ++j) fac.push_back(interpolate(scheme_mesh(ex.op, j, eps, p), term[j]));
        g.push(RankOneTerm::grid(std::move(fac)));
    }
    return g;
}

// max(||f||_t, tripnorm(g_r, t + zeta)) with g_r = f.
double data_norm_surrogate(const ExactProblem& ex, const SchemeParameters& p)
{
    double ft = p.t == -1.0 ? std::sqrt(f_dot_u(ex.op, ex.f)) : ht_norm(ex.op, ex.f, p.t);
    return std::max(ft, tripnorm_upper(ex.op, ex.f, p.t + p.zeta));
}

BenchRow run_bench_row(int d, double eps, const SchemeParameters& p, const GrowthClass& gamma)
{
    BenchRow row;
    row.d = d;
    row.eps = eps;
    ExactProblem ex = poly_bump_problem(d);
    TensorSum g = nodal_data_on_scheme_mesh(ex, eps, p);
    SchemeResult res = run_scheme_exp(ex.op, g, eps, p, gamma);
    row.report = res.report;
    row.errors = error_norms(ex, res.u);
    row.surrogate = data_norm_surrogate(ex, p);
    return row;
}

CriterionResult check_tail_domination()
{
    Timer tm;
    CriterionResult r{1, "expsum tail domination", true, "", 0, 10, {}};
    double worst = 0;
    for (int rr : kRset) {
        ExpSum s = build_expsum(rr);
        for (const ExpSum& v : {s, clip(s)}) {
            double T = t_r(rr);
            double m = max_x_times_s(v, T, 1e4 * T, 10000);
            double amin = *std::min_element(v.nodes.begin(), v.nodes.end());
            m = std::max(m, max_x_times_s(v, T, std::max(1e4 * T, 60.0 / amin), 20000));
            worst = std::max(worst, m);
            if (m > 1.0 + 1e-14) r.pass = false;
        }
        r.metrics.emplace_back("max_xS_r" + std::to_string(rr), worst);
    }
    r.detail = "max x*S(x) over x >= T_r: " + fmt(worst) + " (limit 1)";
    return finish(r, tm);
}

CriterionResult check_expsum_decay()
{
    Timer tm;
    CriterionResult r{2, "expsum decay", true, "", 0, 60, {}};
    std::vector<double> xs, ys;
    for (int rr : kRset) {
        ExpSum s = build_expsum(rr);
        xs.push_back(std::sqrt(double(rr)));
        ys.push_back(std::log(s.measured_sup_error));
        r.metrics.emplace_back("sup_err_r" + std::to_string(rr), s.measured_sup_error);
    }
    double slope = fit_slope(xs, ys);
    ExpSum p = build_expsum(25, true);
    double lim = 16 * std::exp(-5 * pi) * 50;
    r.metrics.emplace_back("slope", slope);
    r.metrics.emplace_back("polished_r25", p.measured_sup_error);
    r.pass = slope <= -1.5 && p.measured_sup_error <= lim;
    r.detail = "slope " + fmt(slope) + " (<= -1.5); polished r=25 error " + fmt(p.measured_sup_error) + " (<= " +
               fmt(lim) + ")";
    return finish(r, tm);
}

CriterionResult check_inverse_error(std::uint64_t seed)
{
    Timer tm;
    CriterionResult r{3, "approximate inverse error", true, "", 0, 30, {}};
    std::mt19937_64 rng(seed);
    SeparableOperator op = laplacian_operator(3, 6);
    TensorSum f = random_tensor(rng, 3, 6, 2);
    const double lmin = op.lambda_min();
    const double c0 = c0_constant(lmin);
    CoefficientBlock fb = to_block(f, kEnumerationCap);
    CoefficientBlock exact = apply_power(op, fb, -1.0);
    const double fm2 = ht_norm(op, fb, -2.0);
    std::vector<double> xs, ys;
    double worst = 0;
    for (int rr : {9, 16, 25, 36}) {
        TensorSum u = approx_inverse_apply(op, f, rr, false);
        CoefficientBlock ub = to_block(u, fb.modes, kEnumerationCap);
        for (std::size_t i = 0; i < ub.size(); ++i) ub.values[i] -= exact.values[i];
        double err = ht_norm(op, ub, 0.0);
        double bound = 10 * c0 * std::exp(-pi * std::sqrt(double(rr))) * fm2;
        worst = std::max(worst, err / bound);
        if (err > bound) r.pass = false;
        xs.push_back(std::sqrt(double(rr)));
        ys.push_back(std::log(err));
        r.metrics.emplace_back("err_r" + std::to_string(rr), err);
        r.metrics.emplace_back("ratio_r" + std::to_string(rr), err / bound);
    }
    double slope = fit_slope(xs, ys);
    r.metrics.emplace_back("slope", slope);
    if (slope > -2.5) r.pass = false;
    r.detail = "slope " + fmt(slope) + " (<= -2.5); max err/bound " + fmt(worst) + " (<= 1)";
    return finish(r, tm);
}

CriterionResult check_contour_convergence(std::uint64_t seed)
{
    Timer tm;
    CriterionResult r{4, "contour quadrature convergence", true, "", 0, 60, {}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Mesh1D m{513, 1.0, 1};
    FemFactor fem = FemFactor::build(m);
    std::vector<double> v(m.n());
    for (auto& x : v) x = nd(rng);
    GridFunction tau{m, v};
    const double b = pi / 12;
    const double c = default_c_under(pi * pi);
    const double lim = -0.8 * 2 * pi * b;
    std::ostringstream det;
    for (double alpha : {0.1, 0.5}) {
        auto ex = dense_matrix_exponential(fem, alpha, v);
        std::vector<double> xs, ys;
        for (double h : {0.5, 0.33, 0.25, 0.2}) {
            ContourRule rule = make_rule(alpha, h, b, c);
            auto e = exp_factor(tau, rule, fem).value.values;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] -= ex[i];
            double err = mass_norm(fem, e) / mass_norm(fem, v);
            xs.push_back(1 / h);
            ys.push_back(std::log(err));
            r.metrics.emplace_back("err_a" + fmt(alpha) + "_h" + fmt(h), err);
        }
        double slope = fit_slope(xs, ys);
        r.metrics.emplace_back("slope_a" + fmt(alpha), slope);
        if (slope > lim) r.pass = false;
        det << "alpha " << alpha << " slope " << fmt(slope) << "; ";
    }
    r.detail = det.str() + "limit " + fmt(lim);
    return finish(r, tm);
}

CriterionResult check_truncation(std::uint64_t seed)
{
    Timer tm;
    CriterionResult r{5, "truncation bound", true, "", 0, 20, {}};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> um(1, 15);
    std::uniform_real_distribution<double> ut(-1.0, 2.0), ud(0.05, 2.0);
    SeparableOperator op = laplacian_operator(2, 32);
    double worst = 0;
    int fails = 0;
    for (int trial = 0; trial < 200; ++trial) {
        RankOneTerm tau = random_rank_one(rng, 2, 16);
        int m = um(rng);
        double t = ut(rng), delta = ud(rng);
        Truncation tr = truncate_rank_one(op, tau, m, t, delta);
        TensorSum full, cut;
        full.push(tau);
        cut.push(tr.term);
        double err = ht_norm(op, difference(full, cut), t);
        worst = std::max(worst, err / tr.error_bound);
        if (err > tr.error_bound * (1 + 1e-12)) ++fails;
    }
    r.pass = fails == 0;
    r.metrics.emplace_back("max_ratio", worst);
    r.detail = "200 cases, max err/bound " + fmt(worst) + ", violations " + std::to_string(fails);
    return finish(r, tm);
}

CriterionResult check_sandwich(std::uint64_t seed)
{
    Timer tm;
    CriterionResult r{6, "rank-one norm sandwich", true, "", 0, 20, {}};
    std::mt19937_64 rng(seed);
    int fails = 0;
    double lo_ratio = INFINITY, hi_ratio = 0;
    for (int d : {2, 3, 4}) {
        SeparableOperator op = laplacian_operator(d, 8);
        for (double s : {0.0, 1.0, 2.0})
            for (int trial = 0; trial < 200; ++trial) {
                RankOneTerm tau = balance(random_rank_one(rng, d, 8));
                SandwichBounds b = rank_one_sandwich(op, tau, s);
                lo_ratio = std::min(lo_ratio, b.value / b.lower);
                hi_ratio = std::max(hi_ratio, b.value / b.upper);
                if (b.lower > b.value * (1 + 1e-12) || b.value > b.upper * (1 + 1e-12)) ++fails;
            }
    }
    r.pass = fails == 0;
    r.metrics.emplace_back("min_value_over_lower", lo_ratio);
    r.metrics.emplace_back("max_value_over_upper", hi_ratio);
    r.detail = "1800 cases, min value/lower " + fmt(lo_ratio) + ", max value/upper " + fmt(hi_ratio) +
               ", violations " + std::to_string(fails);
    return finish(r, tm);
}

CriterionResult check_scheme_end_to_end()
{
    Timer tm;
    CriterionResult r{7, "Scheme-Exp end to end", true, "", 0, 300, {}};
    SchemeParameters p;
    GrowthClass gamma = GrowthClass::stretched_exponential(1.0, 1.0);
    std::ostringstream det;
    for (int d : {2, 4})
        for (double eps : {1e-1, 1e-2}) {
            BenchRow row = run_bench_row(d, eps, p, gamma);
            const SolveReport& rep = row.report;
            double lim = 10 * eps * row.surrogate;
            bool ok_err = row.errors.h1 <= lim;
            bool ok_rank = rep.rank_out <= std::size_t(rep.r) * rep.R;
            double lmin = d * pi * pi;
            bool ok_floor = true;
            for (double a : rep.alphas)
                if (a < rep.alpha_floor_tr * (1 - 1e-12) || a < rep.alpha_floor_eps) ok_floor = false;
            if (rep.alpha_floor_tr * lmin < rep.alpha_floor_eps * lmin * (1 - 1e-12)) ok_floor = false;
            if (!(ok_err && ok_rank && ok_floor)) r.pass = false;
            std::string tag = "d" + std::to_string(d) + "_eps" + fmt(eps);
            r.metrics.emplace_back("h1_" + tag, row.errors.h1);
            r.metrics.emplace_back("rel_h1_" + tag, row.errors.h1 / row.errors.exact_h1);
            r.metrics.emplace_back("limit_" + tag, lim);
            det << "d=" << d << " eps=" << eps << ": h1 " << fmt(row.errors.h1) << " <= " << fmt(lim) << " rank "
                << rep.rank_out << " <= " << rep.r * rep.R << (ok_floor ? " floor ok" : " floor FAIL") << "; ";
        }
    r.detail = det.str();
    return finish(r, tm);
}

CriterionResult check_tractability()
{
    Timer tm;
    CriterionResult r{8, "tractability scaling", true, "", 0, 600, {}};
    SchemeParameters p;
    GrowthClass gamma = GrowthClass::stretched_exponential(1.0, 1.0);
    std::vector<double> xs, ys;
    bool linear = true;
    std::ostringstream det;
    for (int d : {2, 4, 8}) {
        BenchRow row = run_bench_row(d, 1e-2, p, gamma);
        const SolveReport& rep = row.report;
        xs.push_back(std::log(double(d)));
        ys.push_back(std::log(work_estimate(rep)));
        if (rep.parameter_count != rep.rank_out * std::size_t(rep.dofs) * std::size_t(d)) linear = false;
        r.metrics.emplace_back("work_d" + std::to_string(d), work_estimate(rep));
        r.metrics.emplace_back("params_d" + std::to_string(d), double(rep.parameter_count));
        det << "d=" << d << " work " << fmt(work_estimate(rep)) << " params " << rep.parameter_count << "; ";
    }
    double slope = fit_slope(xs, ys);
    r.metrics.emplace_back("slope", slope);
    r.pass = slope <= 2.0 && linear;
    r.detail = det.str() + "slope " + fmt(slope) + " (<= 2)" + (linear ? ", params = rank*n*d" : ", params not linear");
    return finish(r, tm);
}

CriterionResult check_oracle_consistency(std::uint64_t seed)
{
    Timer tm;
    CriterionResult r{9, "oracle self-consistency", true, "", 0, 30, {}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ux(0.0, 1.0);

    SeparableOperator op3 = laplacian_operator(3, 16);
    CoefficientBlock f = dense_block(random_tensor(rng, 3, 16, 2), 16);
    CoefficientBlock back = dense_inverse_solve(op3, dense_forward(op3, f));
    double rt = 0, fmax = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        rt = std::max(rt, std::abs(back.values[i] - f.values[i]));
        fmax = std::max(fmax, std::abs(f.values[i]));
    }
    rt /= fmax;

    FemFactor fem = FemFactor::build(Mesh1D{513, 1.0, 1});
    std::vector<double> v(fem.mesh.n());
    for (auto& x : v) x = nd(rng);
    auto e1 = dense_matrix_exponential(fem, 0.5, v);
    auto e2 = pade_matrix_exponential(fem, 0.5, v);
    std::vector<double> diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = e1[i] - e2[i];
    double mexp = mass_norm(fem, diff) / mass_norm(fem, v);

    SeparableOperator op2 = laplacian_operator(2, 8);
    TensorSum g = random_tensor(rng, 2, 8, 2);
    CoefficientBlock ub = dense_inverse_solve(op2, dense_block(g, 8));
    double pw = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {ux(rng), ux(rng)};
        double a = eigen_exact_pointwise(op2, g, x);
        double b = synthesize_pointwise(op2, ub, x);
        pw = std::max(pw, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    r.metrics.emplace_back("roundtrip", rt);
    r.metrics.emplace_back("matrix_exp", mexp);
    r.metrics.emplace_back("pointwise", pw);
    r.pass = rt <= 1e-14 && mexp <= 1e-10 && pw <= 1e-12;
    r.detail = "round trip " + fmt(rt) + " (<= 1e-14); exp algorithms " + fmt(mexp) + " (<= 1e-10); pointwise " +
               fmt(pw) + " (<= 1e-12)";
    return finish(r, tm);
}

std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed)
{
    std::vector<CriterionResult> out;
    bool all = suite == "all";
    if (!all && suite != "expsum" && suite != "spectral" && suite != "contour" && suite != "scheme")
        throw ConfigError("suite", "unknown suite '" + suite + "' (expsum, spectral, contour, scheme, all)");
    if (all || suite == "expsum") {
        out.push_back(check_tail_domination());
        out.push_back(check_expsum_decay());
    }
    if (all || suite == "spectral") {
        out.push_back(check_inverse_error(seed));
        out.push_back(check_truncation(seed));
        out.push_back(check_sandwich(seed));
    }
    if (all || suite == "contour") out.push_back(check_contour_convergence(seed));
    if (all || suite == "scheme") {
        out.push_back(check_scheme_end_to_end());
        out.push_back(check_tractability());
    }
    if (all || suite == "spectral") out.push_back(check_oracle_consistency(seed));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

} // namespace tsolve
