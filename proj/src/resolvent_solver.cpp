#include "tsolve/resolvent_solver.hpp"

#include "tsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsolve {

// Smallest n reaching H1 error 1e-3 * |w|_{zeta-1} on -u'' = w, w = e^x sin(pi x) + x(1-x),
// against a 2^14-node reference: n = 13 (P2, zeta 2), n = 288 (P1, zeta 1).
double default_c8(int order) { return order == 2 ? 0.41109 : 0.288; }

FemFactor FemFactor::build(const Mesh1D& mesh, double kappa)
{
    FemFactor f;
    f.mesh = mesh;
    f.kappa = kappa;
    f.K = assemble_stiffness(mesh, kappa);
    f.M = assemble_mass(mesh);
    return f;
}

namespace {

// Complex symmetric band LDL^T without pivoting. The Hermitian part of
// e^{i phi}(K - zM) is definite off the spectrum, so pivots stay away from 0.
struct BandLdl {
    int n = 0, p = 0;
    std::vector<cplx> L;   // L[i*(p+1) + k] = L(i, i-k), k = 1..p
    std::vector<cplx> D;
    double flops = 0;
};

BandLdl factor(cplx z, const FemFactor& fem)
{
    const BandedSym& K = fem.K;
    const BandedSym& M = fem.M;
    BandLdl f;
    f.n = K.n;
    f.p = K.p;
    const int n = f.n, p = f.p;
    f.L.assign(std::size_t(n) * (p + 1), 0.0);
    f.D.assign(n, 0.0);
    auto A = [&](int i, int j) { return z * M(i, j) - K(i, j); };
    double anorm = std::abs(z) * M.max_abs() + K.max_abs();
    auto Lij = [&](int i, int j) -> cplx& { return f.L[std::size_t(i) * (p + 1) + (i - j)]; };
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - p); j < i; ++j) {
            cplx s = A(i, j);
            for (int k = std::max(0, i - p); k < j; ++k) {
                s -= Lij(i, k) * Lij(j, k) * f.D[k];
                f.flops += 14;
            }
            Lij(i, j) = s / f.D[j];
            f.flops += 11;
        }
        cplx s = A(i, i);
        for (int k = std::max(0, i - p); k < i; ++k) {
            s -= Lij(i, k) * Lij(i, k) * f.D[k];
            f.flops += 14;
        }
        if (std::abs(s) < 1e-14 * anorm) {
            std::ostringstream os;
            os << "resolvent solve: pivot " << std::abs(s) << " at row " << i << " for z = " << z.real()
               << (z.imag() < 0 ? "" : "+") << z.imag() << "i (shift at or near a discrete eigenvalue)";
            throw SolverError(os.str());
        }
        f.D[i] = s;
    }
    return f;
}

void substitute(const BandLdl& f, std::vector<cplx>& b)
{
    const int n = f.n, p = f.p;
    auto Lij = [&](int i, int j) { return f.L[std::size_t(i) * (p + 1) + (i - j)]; };
    for (int i = 0; i < n; ++i)
        for (int k = std::max(0, i - p); k < i; ++k) b[i] -= Lij(i, k) * b[k];
    for (int i = 0; i < n; ++i) b[i] /= f.D[i];
    for (int i = n - 1; i >= 0; --i)
        for (int k = i + 1; k <= std::min(n - 1, i + p); ++k) b[i] -= Lij(k, i) * b[k];
}

} // namespace

ResolventResult solve_resolvent(cplx z, const std::vector<cplx>& w, const FemFactor& fem)
{
    if (int(w.size()) != fem.mesh.n()) throw DomainError("solve_resolvent: load size does not match mesh");
    ResolventResult r;
    r.u.mesh = fem.mesh;
    bool zero = std::all_of(w.begin(), w.end(), [](cplx c) { return c == cplx(0); });
    if (zero) {
        r.u.values.assign(w.size(), 0.0);
        return r;
    }
    BandLdl f = factor(z, fem);
    std::vector<cplx> b = fem.M.multiply(w);
    substitute(f, b);
    const int n = fem.mesh.n(), p = fem.K.p;
    r.flops = f.flops + double(n) * (8.0 * (2 * p + 1)) + double(n) * (16.0 * p + 6);
    r.u.values = std::move(b);
    return r;
}

ResolventResult solve_resolvent(cplx z, const GridFunction& w, const FemFactor& fem)
{
    if (!(w.mesh == fem.mesh)) throw DomainError("solve_resolvent: load mesh differs from factor mesh");
    std::vector<cplx> wc(w.values.begin(), w.values.end());
    return solve_resolvent(z, wc, fem);
}

double resolvent_residual(cplx z, const std::vector<cplx>& w, const std::vector<cplx>& u, const FemFactor& fem)
{
    auto Mu = fem.M.multiply(u);
    auto Ku = fem.K.multiply(u);
    auto Mw = fem.M.multiply(w);
    double rn = 0, un = 0, bn = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        rn = std::max(rn, std::abs(z * Mu[i] - Ku[i] - Mw[i]));
        un = std::max(un, std::abs(u[i]));
        bn = std::max(bn, std::abs(Mw[i]));
    }
    double an = std::abs(z) * fem.M.max_abs() * (2 * fem.M.p + 1) + fem.K.max_abs() * (2 * fem.K.p + 1);
    return rn / (an * un + bn);
}

Mesh1D mesh_for_target(double delta, double zeta, double c8, int order, double L)
{
    if (!(delta > 0) || !(zeta > 0) || !(c8 > 0)) throw DomainError("mesh_for_target: positive inputs required");
    double x = c8 * std::pow(delta, -1.0 / zeta);
    int n = std::max(1, int(std::ceil(x - 1e-9 * std::max(1.0, x))));
    Mesh1D m;
    m.L = L;
    m.order = order;
    m.elements = order == 1 ? n + 1 : std::max(1, (n + 2) / 2);
    return m;
}

ExpFactorResult exp_factor(const GridFunction& tau, const ContourRule& rule, const FemFactor& fem)
{
    ExpFactorResult r;
    GridFunction t = transfer(tau, fem.mesh);
    r.value.mesh = fem.mesh;
    r.value.values.assign(fem.mesh.n(), 0.0);
    std::vector<double> acc(fem.mesh.n(), 0.0);
    for (int q = 0; q <= rule.N; ++q) {
        ResolventResult s = solve_resolvent(rule.node(q), t, fem);
        r.flops += s.flops;
        ++r.solves;
        const cplx p = rule.prefactor(q);
        const double mult = q == 0 ? 1.0 : 2.0;
        for (int i = 0; i < fem.mesh.n(); ++i) acc[i] += mult * (p * s.u.values[i]).real();
    }
    for (int i = 0; i < fem.mesh.n(); ++i) r.value.values[i] = rule.h * acc[i];
    return r;
}

ComplexGridFunction exp_factor_full(const GridFunction& tau, const ContourRule& rule, const FemFactor& fem)
{
    GridFunction t = transfer(tau, fem.mesh);
    ComplexGridFunction out{fem.mesh, std::vector<cplx>(fem.mesh.n(), 0.0)};
    for (int q = -rule.N; q <= rule.N; ++q) {
        ResolventResult s = solve_resolvent(rule.node(q), t, fem);
        const cplx p = rule.prefactor(q);
        for (int i = 0; i < fem.mesh.n(); ++i) out.values[i] += rule.h * p * s.u.values[i];
    }
    return out;
}

namespace {

void fe_eval_both(const GridFunction& g, double x, int elem_hint, double& v, double& dv)
{
    const Mesh1D& m = g.mesh;
    double H = m.hsize();
    int e = elem_hint;
    double xi = (x - e * H) / H;
    double phi[3], dphi[3];
    shape(m.order, xi, phi, dphi);
    v = dv = 0;
    for (int a = 0; a <= m.order; ++a) {
        int i = m.order * e + a - 1;
        if (i >= 0 && i < m.n()) {
            v += phi[a] * g.values[i];
            dv += dphi[a] * g.values[i] / H;
        }
    }
}

// Integrates (u-v)^2 and (u'-v')^2 over the merged partition.
std::pair<double, double> merged_diff(const GridFunction& u, const GridFunction& v)
{
    if (u.mesh.L != v.mesh.L) throw DomainError("FE difference: interval lengths differ");
    std::vector<double> br;
    for (int e = 0; e <= u.mesh.elements; ++e) br.push_back(e * u.mesh.hsize());
    for (int e = 0; e <= v.mesh.elements; ++e) br.push_back(e * v.mesh.hsize());
    std::sort(br.begin(), br.end());
    GaussRule q = gauss_legendre(4);
    double l2 = 0, h1 = 0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        double a = br[k], b = br[k + 1];
        if (b - a < 1e-15 * u.mesh.L) continue;
        double mid = 0.5 * (a + b);
        int eu = std::min(u.mesh.elements - 1, int(mid / u.mesh.hsize()));
        int ev = std::min(v.mesh.elements - 1, int(mid / v.mesh.hsize()));
        for (std::size_t i = 0; i < q.x.size(); ++i) {
            double x = a + (b - a) * q.x[i];
            double uv, ud, vv, vd;
            fe_eval_both(u, x, eu, uv, ud);
            fe_eval_both(v, x, ev, vv, vd);
            l2 += q.w[i] * (b - a) * (uv - vv) * (uv - vv);
            h1 += q.w[i] * (b - a) * (ud - vd) * (ud - vd);
        }
    }
    return {l2, h1};
}

} // namespace

double h1_seminorm_diff(const GridFunction& u, const GridFunction& v) { return std::sqrt(merged_diff(u, v).second); }
double l2_diff(const GridFunction& u, const GridFunction& v) { return std::sqrt(merged_diff(u, v).first); }

GridFunction real_part(const ComplexGridFunction& u)
{
    GridFunction g{u.mesh, std::vector<double>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i) g.values[i] = u.values[i].real();
    return g;
}

GridFunction imag_part(const ComplexGridFunction& u)
{
    GridFunction g{u.mesh, std::vector<double>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i) g.values[i] = u.values[i].imag();
    return g;
}

} // namespace tsolve
