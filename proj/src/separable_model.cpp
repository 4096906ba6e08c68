#include "tsolve/separable_model.hpp"

#include "tsolve/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsolve {

using std::numbers::pi;

double FactorSpectrum::lambda(int k) const
{
    if (k < 1 || k > modes())
        throw DomainError("mode " + std::to_string(k) + " outside factor range 1.." + std::to_string(modes()));
    return eigenvalues[k - 1];
}

FactorSpectrum dirichlet_laplacian_factor(int n_modes, double L)
{
    if (n_modes < 1 || !(L > 0)) throw DomainError("dirichlet_laplacian_factor: need n_modes >= 1, L > 0");
    FactorSpectrum f;
    f.length = L;
    for (int k = 1; k <= n_modes; ++k) f.eigenvalues.push_back(std::pow(k * pi / L, 2));
    const double c = std::sqrt(2.0 / L);
    f.evaluator = [c, L](int k, double x) { return c * std::sin(k * pi * x / L); };
    return f;
}

FactorSpectrum explicit_factor(std::vector<double> eigenvalues)
{
    if (eigenvalues.empty()) throw DomainError("explicit factor needs eigenvalues");
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (!(eigenvalues[k] > 0)) throw DomainError("factor eigenvalues must be positive");
        if (k && eigenvalues[k] < eigenvalues[k - 1]) throw DomainError("factor eigenvalues must be nondecreasing");
    }
    FactorSpectrum f;
    f.eigenvalues = std::move(eigenvalues);
    return f;
}

double orthonormality_defect(const FactorSpectrum& f, int m)
{
    if (!f.evaluator) throw DomainError("factor has no eigenfunction evaluator");
    m = std::min(m, f.modes());
    GaussRule q = gauss_legendre(8);
    const int panels = 8 * m + 16;
    const double H = f.length / panels;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> vals(m);
    for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < q.x.size(); ++i) {
            double x = (p + q.x[i]) * H;
            for (int k = 0; k < m; ++k) vals[k] = f.evaluator(k + 1, x);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) G(a, b) += q.w[i] * H * vals[a] * vals[b];
        }
    return (G - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
}

double SeparableOperator::lambda_min() const
{
    double s = 0;
    for (const auto& f : factors) s += f.eigenvalues.front();
    return s;
}

SeparableOperator laplacian_operator(int d, int n_modes, double L)
{
    SeparableOperator op;
    for (int j = 0; j < d; ++j) op.factors.push_back(dirichlet_laplacian_factor(n_modes, L));
    return op;
}

void validate(const SeparableOperator& op)
{
    if (op.d() < 1) throw DomainError("operator needs d >= 1");
    for (const auto& f : op.factors) {
        if (f.eigenvalues.empty() || !(f.eigenvalues.front() > 0))
            throw DomainError("factor eigenvalues must be positive");
        for (std::size_t k = 1; k < f.eigenvalues.size(); ++k)
            if (f.eigenvalues[k] < f.eigenvalues[k - 1]) throw DomainError("factor eigenvalues must be nondecreasing");
    }
}

double lambda_nu(const SeparableOperator& op, const std::vector<int>& nu)
{
    if (int(nu.size()) != op.d()) throw DomainError("multi-index length does not match d");
    double s = 0;
    for (int j = 0; j < op.d(); ++j) s += op.factors[j].lambda(nu[j]);
    return s;
}

double factor_hs_norm(const FactorSpectrum& f, const SparseVec& v, double s)
{
    double acc = 0;
    for (std::size_t i = 0; i < v.nnz(); ++i) acc += std::pow(f.lambda(v.idx[i]), s) * v.val[i] * v.val[i];
    return std::sqrt(acc);
}

namespace {

// sum_k lambda_k^p u_k v_k over common support.
double wdot(const FactorSpectrum& f, const SparseVec& u, const SparseVec& v, int p)
{
    double s = 0;
    std::size_t i = 0, j = 0;
    while (i < u.nnz() && j < v.nnz()) {
        if (u.idx[i] < v.idx[j]) ++i;
        else if (u.idx[i] > v.idx[j]) ++j;
        else {
            double l = p == 0 ? 1.0 : (p == 1 ? f.lambda(u.idx[i]) : std::pow(f.lambda(u.idx[i]), p));
            s += l * u.val[i] * v.val[j];
            ++i;
            ++j;
        }
    }
    return s;
}

void require_eigen(const TensorSum& v, const char* what)
{
    if (v.rep != Representation::eigen) throw DomainError(std::string(what) + ": eigen representation required");
}

double integer_norm_sq(const SeparableOperator& op, const TensorSum& v, int t)
{
    const int d = op.d();
    double total = 0;
    std::vector<double> g0(d), g1(d), g2(d);
    for (const auto& a : v.terms)
        for (const auto& b : v.terms) {
            for (int j = 0; j < d; ++j) {
                g0[j] = wdot(op.factors[j], a.eig[j], b.eig[j], 0);
                if (t >= 1) g1[j] = wdot(op.factors[j], a.eig[j], b.eig[j], 1);
                if (t >= 2) g2[j] = wdot(op.factors[j], a.eig[j], b.eig[j], 2);
            }
            double pair = 0;
            if (t == 0) {
                pair = 1;
                for (int j = 0; j < d; ++j) pair *= g0[j];
            } else {
                for (int j = 0; j < d; ++j) {
                    double p = (t == 1 ? g1[j] : g2[j]);
                    for (int i = 0; i < d; ++i)
                        if (i != j) p *= g0[i];
                    pair += p;
                    if (t == 2)
                        for (int jj = 0; jj < d; ++jj) {
                            if (jj == j) continue;
                            double q = g1[j] * g1[jj];
                            for (int i = 0; i < d; ++i)
                                if (i != j && i != jj) q *= g0[i];
                            pair += q;
                        }
                }
            }
            total += pair;
        }
    return total;
}

} // namespace

double ht_norm(const SeparableOperator& op, const CoefficientBlock& b, double t)
{
    double acc = 0;
    b.for_each([&](std::size_t flat, const std::vector<int>& pos) {
        double c = b.values[flat];
        if (c == 0) return;
        double lam = 0;
        for (int j = 0; j < b.d(); ++j) lam += op.factors[j].lambda(b.modes[j][pos[j]]);
        acc += std::pow(lam, t) * c * c;
    });
    return std::sqrt(acc);
}

double ht_norm(const SeparableOperator& op, const TensorSum& v, double t, std::size_t cap)
{
    require_eigen(v, "ht_norm");
    if (v.terms.empty()) return 0.0;
    if (v.d != op.d()) throw DomainError("ht_norm: tensor and operator dimensions differ");
    if (t == 0.0 || t == 1.0 || t == 2.0) return std::sqrt(std::max(0.0, integer_norm_sq(op, v, int(t))));
    auto modes = product_support(v);
    if (product_size(modes) > cap)
        throw CapacityError("ht_norm: product support " + std::to_string(product_size(modes)) +
                            " exceeds enumeration cap " + std::to_string(cap) + "; truncate the tensor first");
    return ht_norm(op, to_block(v, modes, cap), t);
}

TensorSum apply_exp(const SeparableOperator& op, const TensorSum& v, double alpha)
{
    require_eigen(v, "apply_exp");
    TensorSum out = v;
    for (auto& term : out.terms)
        for (int j = 0; j < op.d(); ++j) {
            auto& f = term.eig[j];
            for (std::size_t i = 0; i < f.nnz(); ++i) f.val[i] *= std::exp(-alpha * op.factors[j].lambda(f.idx[i]));
        }
    return out;
}

TensorSum apply_expsum(const SeparableOperator& op, const TensorSum& v, const ExpSum& s)
{
    require_eigen(v, "apply_expsum");
    TensorSum out;
    out.rep = Representation::eigen;
    out.d = v.d;
    for (const auto& term : v.terms)
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!(s.weights[k] > 0)) continue;
            RankOneTerm t = term;
            for (int j = 0; j < op.d(); ++j) {
                auto& f = t.eig[j];
                for (std::size_t i = 0; i < f.nnz(); ++i) {
                    f.val[i] *= std::exp(-s.nodes[k] * op.factors[j].lambda(f.idx[i]));
                    if (j == 0) f.val[i] *= s.weights[k];
                }
            }
            out.terms.push_back(std::move(t));
        }
    return out;
}

CoefficientBlock apply_power(const SeparableOperator& op, const CoefficientBlock& b, double p)
{
    CoefficientBlock out = b;
    out.for_each([&](std::size_t flat, const std::vector<int>& pos) {
        double lam = 0;
        for (int j = 0; j < b.d(); ++j) lam += op.factors[j].lambda(b.modes[j][pos[j]]);
        out.values[flat] *= std::pow(lam, p);
    });
    return out;
}

CoefficientBlock apply_inverse_dense(const SeparableOperator& op, const TensorSum& v, std::size_t cap)
{
    require_eigen(v, "apply_inverse_dense");
    return apply_power(op, to_block(v, cap), -1.0);
}

RotationPreprocess rotate_spd(const Eigen::MatrixXd& A)
{
    if (A.rows() != A.cols() || A.rows() == 0) throw DomainError("rotate_spd: square matrix required");
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw DomainError("rotate_spd: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    if (es.info() != Eigen::Success) throw DomainError("rotate_spd: eigendecomposition failed");
    RotationPreprocess r;
    r.D = es.eigenvalues();
    if (r.D.minCoeff() <= 0) throw DomainError("rotate_spd: matrix is not positive definite");
    r.Q = es.eigenvectors().transpose();
    for (int i = 0; i < r.Q.rows(); ++i)
        for (int j = 0; j < r.Q.cols(); ++j)
            if (std::abs(r.Q(i, j)) > 1e-12) {
                if (r.Q(i, j) < 0) r.Q.row(i) *= -1.0;
                break;
            }
    return r;
}

SeparableOperator apply_rotation(const SeparableOperator& op, const RotationPreprocess& rot)
{
    if (rot.D.size() != op.d()) throw DomainError("apply_rotation: dimension mismatch");
    SeparableOperator out = op;
    for (int j = 0; j < op.d(); ++j) {
        for (auto& l : out.factors[j].eigenvalues) l *= rot.D[j];
        out.factors[j].kappa *= rot.D[j];
    }
    return out;
}

} // namespace tsolve
