#include "tsolve/oracle.hpp"

#include "tsolve/errors.hpp"
#include "tsolve/tensor_format.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace tsolve {

CoefficientBlock dense_block(const TensorSum& f, int M)
{
    std::vector<std::vector<int>> modes(f.d);
    for (auto& m : modes)
        for (int k = 1; k <= M; ++k) m.push_back(k);
    return to_block(f, modes, kDenseCap);
}

CoefficientBlock dense_inverse_solve(const SeparableOperator& op, const CoefficientBlock& f)
{
    if (f.size() > kDenseCap) throw CapacityError("dense block exceeds 2^24 entries");
    return apply_power(op, f, -1.0);
}

CoefficientBlock dense_forward(const SeparableOperator& op, const CoefficientBlock& f)
{
    if (f.size() > kDenseCap) throw CapacityError("dense block exceeds 2^24 entries");
    return apply_power(op, f, 1.0);
}

namespace {

std::vector<std::vector<double>> eval_modes(const SeparableOperator& op, const std::vector<std::vector<int>>& modes,
                                            const std::vector<double>& x)
{
    if (int(x.size()) != op.d()) throw DomainError("point dimension does not match d");
    std::vector<std::vector<double>> ev(op.d());
    for (int j = 0; j < op.d(); ++j) {
        if (!op.factors[j].evaluator) throw DomainError("factor has no eigenfunction evaluator");
        for (int k : modes[j]) ev[j].push_back(op.factors[j].evaluator(k, x[j]));
    }
    return ev;
}

double synth(const CoefficientBlock& b, const std::vector<std::vector<double>>& ev, bool reverse)
{
    std::vector<double> terms(b.size());
    b.for_each([&](std::size_t flat, const std::vector<int>& pos) {
        double p = b.values[flat];
        for (int j = 0; j < b.d() && p != 0; ++j) p *= ev[j][pos[j]];
        terms[flat] = p;
    });
    double s = 0;
    if (reverse)
        for (std::size_t i = terms.size(); i-- > 0;) s += terms[i];
    else
        for (double t : terms) s += t;
    return s;
}

} // namespace

double synthesize_pointwise(const SeparableOperator& op, const CoefficientBlock& b, const std::vector<double>& x)
{
    return synth(b, eval_modes(op, b.modes, x), false);
}

double eigen_exact_pointwise(const SeparableOperator& op, const TensorSum& f, const std::vector<double>& x,
                             bool reverse_order)
{
    CoefficientBlock b = apply_inverse_dense(op, f, kEnumerationCap);
    return synth(b, eval_modes(op, b.modes, x), reverse_order);
}

namespace {

void dense_mats(const FemFactor& fem, Eigen::MatrixXd& K, Eigen::MatrixXd& M)
{
    const int n = fem.mesh.n();
    if (n > 4096) throw CapacityError("dense matrix exponential limited to 4096 unknowns");
    K.resize(n, n);
    M.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K(i, j) = fem.K(i, j);
            M(i, j) = fem.M(i, j);
        }
}

} // namespace

std::vector<double> dense_matrix_exponential(const FemFactor& fem, double alpha, const std::vector<double>& v)
{
    Eigen::MatrixXd K, M;
    dense_mats(fem, K, M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    const Eigen::MatrixXd& V = es.eigenvectors();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
    Eigen::VectorXd c = V.transpose() * (M * x);
    c.array() *= (-alpha * es.eigenvalues().array()).exp();
    Eigen::VectorXd y = V * c;
    return {y.data(), y.data() + y.size()};
}

std::vector<double> pade_matrix_exponential(const FemFactor& fem, double alpha, const std::vector<double>& v)
{
    Eigen::MatrixXd K, M;
    dense_mats(fem, K, M);
    Eigen::MatrixXd A = -alpha * M.ldlt().solve(K);
    Eigen::MatrixXd E = A.exp();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
    Eigen::VectorXd y = E * x;
    return {y.data(), y.data() + y.size()};
}

double mass_norm(const FemFactor& fem, const std::vector<double>& v) { return std::sqrt(fem.M.dot(v, v)); }

double laplace_integral(const std::function<double(double)>& g, double lambda_min, int p)
{
    const double hs = 0.02;
    const double s_lo = -45.0;
    const double s_hi = std::log(60.0 / lambda_min);
    double acc = 0;
    for (double s = s_lo; s <= s_hi; s += hs) {
        double t = std::exp(s);
        acc += g(t) * std::pow(t, p + 1);
    }
    return acc * hs;
}

namespace {

// sum_k a_k b_k exp(-t lambda_k) over common modes, as (lambda, product) pairs.
std::vector<std::pair<double, double>> common_modes(const FactorSpectrum& f, const SparseVec& a, const SparseVec& b)
{
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0, j = 0;
    while (i < a.nnz() && j < b.nnz()) {
        if (a.idx[i] < b.idx[j]) ++i;
        else if (a.idx[i] > b.idx[j]) ++j;
        else {
            out.emplace_back(f.lambda(a.idx[i]), a.val[i] * b.val[j]);
            ++i;
            ++j;
        }
    }
    return out;
}

double laplace_quadratic(const SeparableOperator& op, const TensorSum& f, int p)
{
    if (f.rep != Representation::eigen) throw DomainError("eigen representation required");
    double total = 0;
    for (const auto& a : f.terms)
        for (const auto& b : f.terms) {
            std::vector<std::vector<std::pair<double, double>>> cm(op.d());
            bool empty = false;
            for (int j = 0; j < op.d(); ++j) {
                cm[j] = common_modes(op.factors[j], a.eig[j], b.eig[j]);
                if (cm[j].empty()) empty = true;
            }
            if (empty) continue;
            total += laplace_integral(
                [&](double t) {
                    double prod = 1;
                    for (const auto& c : cm) {
                        double s = 0;
                        for (const auto& [l, v] : c) s += v * std::exp(-t * l);
                        prod *= s;
                    }
                    return prod;
                },
                op.lambda_min(), p);
        }
    return total;
}

// G[k][i] = <e_k, phi_i> for modes 1..M on the FE mesh.
std::vector<std::vector<double>> eig_loads(const FactorSpectrum& f, const Mesh1D& m, int M)
{
    std::vector<std::vector<double>> G(M, std::vector<double>(m.n(), 0.0));
    const double H = m.hsize();
    const int sub = int(std::ceil(M * H / m.L)) + 1;
    GaussRule q = gauss_legendre(8);
    std::vector<double> ek(M);
    for (int e = 0; e < m.elements; ++e)
        for (int s = 0; s < sub; ++s)
            for (std::size_t g = 0; g < q.x.size(); ++g) {
                double xi = (s + q.x[g]) / sub;
                double x = (e + xi) * H;
                double w = q.w[g] * H / sub;
                double phi[3], dphi[3];
                shape(m.order, xi, phi, dphi);
                for (int k = 0; k < M; ++k) ek[k] = f.evaluator(k + 1, x);
                for (int a = 0; a <= m.order; ++a) {
                    int i = m.order * e + a - 1;
                    if (i < 0 || i >= m.n()) continue;
                    for (int k = 0; k < M; ++k) G[k][i] += w * phi[a] * ek[k];
                }
            }
    return G;
}

} // namespace

double f_dot_u(const SeparableOperator& op, const TensorSum& f) { return laplace_quadratic(op, f, 0); }
double u_norm_sq(const SeparableOperator& op, const TensorSum& f) { return laplace_quadratic(op, f, 1); }

double f_dot_u_enumerated(const SeparableOperator& op, const TensorSum& f)
{
    CoefficientBlock b = to_block(f, kEnumerationCap);
    CoefficientBlock u = apply_power(op, b, -1.0);
    double s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) s += b.values[i] * u.values[i];
    return s;
}

SparseVec project_sine(const std::function<double(double)>& g, const FactorSpectrum& f, int M)
{
    if (!f.evaluator) throw DomainError("project_sine: factor has no evaluator");
    M = std::min(M, f.modes());
    GaussRule q = gauss_legendre(8);
    const int panels = 8 * M + 64;
    const double H = f.length / panels;
    std::vector<double> c(M, 0.0);
    for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < q.x.size(); ++i) {
            double x = (p + q.x[i]) * H;
            double gx = g(x) * q.w[i] * H;
            for (int k = 0; k < M; ++k) c[k] += gx * f.evaluator(k + 1, x);
        }
    return SparseVec::dense(c);
}

double energy_inner(const SeparableOperator& op, const TensorSum& u, const TensorSum& v)
{
    if (u.terms.empty() || v.terms.empty()) return 0.0;
    if (u.rep != Representation::nodal || v.rep != Representation::nodal)
        throw DomainError("energy_inner: nodal representation required");
    const int d = op.d();
    std::vector<BandedSym> K(d), M(d);
    for (int j = 0; j < d; ++j) {
        K[j] = assemble_stiffness(u.terms[0].nodal[j].mesh, op.factors[j].kappa);
        M[j] = assemble_mass(u.terms[0].nodal[j].mesh);
    }
    double s = 0;
    std::vector<double> m(d), k(d);
    for (const auto& a : u.terms)
        for (const auto& b : v.terms) {
            for (int j = 0; j < d; ++j) {
                if (!(a.nodal[j].mesh == u.terms[0].nodal[j].mesh) || !(b.nodal[j].mesh == a.nodal[j].mesh))
                    throw DomainError("energy_inner: nodal meshes differ");
                m[j] = M[j].dot(a.nodal[j].values, b.nodal[j].values);
                k[j] = K[j].dot(a.nodal[j].values, b.nodal[j].values);
            }
            for (int j = 0; j < d; ++j) {
                double p = k[j];
                for (int i = 0; i < d; ++i)
                    if (i != j) p *= m[i];
                s += p;
            }
        }
    return s;
}

double nodal_tripnorm_h1(const SeparableOperator& op, const TensorSum& u)
{
    if (u.terms.empty()) return 0.0;
    double m = std::sqrt(std::max(0.0, energy_inner(op, u, u)));
    for (const auto& t : u.terms) {
        TensorSum one;
        one.push(t);
        m = std::max(m, std::sqrt(std::max(0.0, energy_inner(op, one, one))));
    }
    return m;
}

ErrorNorms error_norms(const ExactProblem& ex, const TensorSum& approx)
{
    const SeparableOperator& op = ex.op;
    const TensorSum& f = ex.f;
    const int d = op.d();
    ErrorNorms out;
    const double fu = f_dot_u(op, f);
    const double uu = u_norm_sq(op, f);
    out.exact_h1 = std::sqrt(fu);
    out.exact_l2 = std::sqrt(uu);
    if (approx.terms.empty()) {
        out.h1 = out.exact_h1;
        out.l2 = out.exact_l2;
        return out;
    }
    if (approx.rep != Representation::nodal || approx.d != d) throw DomainError("error_norms: nodal approximation of matching d required");

    auto modes = product_support(f);
    std::vector<int> Mj(d);
    std::vector<std::vector<std::vector<double>>> G(d);
    for (int j = 0; j < d; ++j) {
        Mj[j] = modes[j].empty() ? 0 : modes[j].back();
        G[j] = eig_loads(op.factors[j], approx.terms[0].nodal[j].mesh, Mj[j]);
    }
    double f_ub = 0, u_ub = 0;
    for (std::size_t a = 0; a < f.rank(); ++a)
        for (const auto& c : approx.terms) {
            // proj[j][k] = f^a_{jk} <e_k, ubar^c_j>
            std::vector<std::vector<std::pair<double, double>>> proj(d);
            double prod = 1;
            for (int j = 0; j < d; ++j) {
                const SparseVec& fa = f.terms[a].eig[j];
                const GridFunction& uc = c.nodal[j];
                if (!(uc.mesh == approx.terms[0].nodal[j].mesh)) throw DomainError("error_norms: nodal meshes differ");
                double dot = 0;
                for (std::size_t i = 0; i < fa.nnz(); ++i) {
                    int k = fa.idx[i];
                    double ek = 0;
                    for (int q = 0; q < uc.mesh.n(); ++q) ek += G[j][k - 1][q] * uc.values[q];
                    proj[j].emplace_back(op.factors[j].lambda(k), fa.val[i] * ek);
                    dot += fa.val[i] * ek;
                }
                if (!ex.functions.empty()) dot = load_inner(uc, ex.functions[a][j], 8);
                prod *= dot;
            }
            f_ub += prod;
            u_ub += laplace_integral(
                [&](double t) {
                    double p = 1;
                    for (const auto& pj : proj) {
                        double s = 0;
                        for (const auto& [l, v] : pj) s += v * std::exp(-t * l);
                        p *= s;
                    }
                    return p;
                },
                op.lambda_min(), 0);
        }
    const double bb = energy_inner(op, approx, approx);
    const double mm = l2_inner(approx, approx);
    out.h1 = std::sqrt(std::max(0.0, fu - 2 * f_ub + bb));
    out.l2 = std::sqrt(std::max(0.0, uu - 2 * u_ub + mm));
    return out;
}

} // namespace tsolve
