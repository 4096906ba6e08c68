#include "helpers.hpp"

#include "tsolve/errors.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/resolvent_solver.hpp"
#include "tsolve/separable_model.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace tsolve;
using std::numbers::pi;

static double e1(double x) { return std::sqrt(2.0) * std::sin(pi * x); }

TEST_CASE("single-mode resolvent amplitude")
{
    cplx z(1.0 + std::cos(pi / 6), 0.0);
    CHECK(1 / (z.real() - pi * pi) == doctest::Approx(-0.124944103173934).epsilon(1e-12));
    for (int order : {1, 2}) {
        Mesh1D m{order == 1 ? 257 : 128, 1.0, order};
        FemFactor fem = FemFactor::build(m);
        GridFunction u = real_part(solve_resolvent(z, interpolate(m, e1), fem).u);
        double amp = load_inner(u, e1, 6);
        CHECK(amp == doctest::Approx(-0.124944103173934).epsilon(order == 1 ? 1e-4 : 1e-7));
    }
}

TEST_CASE("zero load")
{
    Mesh1D m{64, 1.0, 1};
    FemFactor fem = FemFactor::build(m);
    ResolventResult r = solve_resolvent(cplx(2.0, 1.0), GridFunction{m, std::vector<double>(m.n(), 0.0)}, fem);
    for (const cplx& v : r.u.values) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("discrete resolvent identity")
{
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd;
    for (int order : {1, 2}) {
        Mesh1D m{200, 1.0, order};
        FemFactor fem = FemFactor::build(m, 1.7);
        ContourRule rule = make_rule(0.2, 0.3, pi / 12, 1.0);
        for (int q : {0, 1, rule.N}) {
            std::vector<cplx> w(m.n());
            for (auto& v : w) v = cplx(nd(rng), nd(rng));
            ResolventResult r = solve_resolvent(rule.node(q), w, fem);
            CHECK(resolvent_residual(rule.node(q), w, r.u.values, fem) <= 1e-12);
        }
    }
}

TEST_CASE("singular shift is reported")
{
    Mesh1D m{9, 1.0, 1};
    FemFactor fem = FemFactor::build(m);
    int n = m.n();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
            K(i, j) = fem.K(i, j);
            M(i, j) = fem.M(i, j);
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    cplx z(es.eigenvalues()(0), 0.0);
    std::vector<cplx> w(n, cplx(1.0, 0.0));
    CHECK_THROWS_AS(solve_resolvent(z, w, fem), SolverError);
}

TEST_CASE("self-convergence against a fine reference")
{
    cplx z = hyperbola_point(0.3, 1.0);
    auto w = [](double x) { return std::exp(x) * std::sin(pi * x) + std::cos(3 * x) * x * (1 - x); };
    for (int order : {1, 2}) {
        Mesh1D ref{order == 1 ? 4097 : 2048, 1.0, order};
        ComplexGridFunction ur = solve_resolvent(z, interpolate(ref, w), FemFactor::build(ref)).u;
        std::vector<double> lx, ly;
        for (int n : {64, 128, 256}) {
            Mesh1D m{order == 1 ? n + 1 : n / 2, 1.0, order};
            ComplexGridFunction u = solve_resolvent(z, interpolate(m, w), FemFactor::build(m)).u;
            double e = std::hypot(h1_seminorm_diff(real_part(u), real_part(ur)), h1_seminorm_diff(imag_part(u), imag_part(ur)));
            lx.push_back(std::log(double(n)));
            ly.push_back(std::log(e));
        }
        double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
        if (order == 1) CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
        else CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
    }
}

TEST_CASE("mesh_for_target")
{
    CHECK(mesh_for_target(1e-2, 2.0, 4.0, 1).n() == 40);
    int a = mesh_for_target(1e-2, 1.0, 0.3, 1).n(), b = mesh_for_target(5e-3, 1.0, 0.3, 1).n();
    CHECK(b == 2 * a);
    CHECK(mesh_for_target(1e-3, 2.0, default_c8(2), 2).n() == 13);
    CHECK(mesh_for_target(1e-3, 1.0, default_c8(1), 1).n() == 288);
}

// Smallest n with |u_n - u_ref|_{H1} <= delta |w|_{H^{zeta-1}} for -u'' = w.
static int calibrate(int order, double delta)
{
    auto w = [](double x) { return std::exp(x) * std::sin(pi * x) + x * (1 - x); };
    FactorSpectrum fs = dirichlet_laplacian_factor(64, 1.0);
    double zeta = order == 2 ? 2.0 : 1.0;
    double nrm = factor_hs_norm(fs, project_sine(w, fs, 64), zeta - 1);
    Mesh1D ref{order == 2 ? 8192 : 16384, 1.0, order};
    GridFunction ur = real_part(solve_resolvent(cplx(0, 0), interpolate(ref, w), FemFactor::build(ref)).u);
    for (int e = order == 1 ? 2 : 1;; ++e) {
        Mesh1D m{e, 1.0, order};
        GridFunction u = real_part(solve_resolvent(cplx(0, 0), interpolate(m, w), FemFactor::build(m)).u);
        if (h1_seminorm_diff(u, ur) <= delta * nrm) return m.n();
    }
}

TEST_CASE("C8 calibration reproduces the frozen constants")
{
    int n2 = calibrate(2, 1e-3);
    CHECK(n2 == 13);
    CHECK(default_c8(2) == doctest::Approx(n2 * std::sqrt(1e-3)).epsilon(1e-4));
    int n1 = calibrate(1, 1e-3);
    CHECK(n1 == 288);
    CHECK(default_c8(1) == doctest::Approx(n1 * 1e-3).epsilon(1e-4));
}

TEST_CASE("contour exponential of one factor")
{
    Mesh1D m{256, 1.0, 2};
    FemFactor fem = FemFactor::build(m);
    GridFunction tau = interpolate(m, e1);
    double h = 0.15;

    ContourRule r01 = make_rule(0.1, h, pi / 12, 1.0);
    GridFunction E = exp_factor(tau, r01, fem).value;
    std::vector<double> dense = dense_matrix_exponential(fem, 0.1, tau.values);
    std::vector<double> diff(m.n());
    for (int i = 0; i < m.n(); ++i) diff[i] = E.values[i] - dense[i];
    double budget = error_constant(0.1, pi / 12, 1.0, 1.0) * std::exp(-2 * pi * (pi / 12) / h);
    CHECK(mass_norm(fem, diff) <= budget * mass_norm(fem, tau.values));
    CHECK(load_inner(E, e1, 6) == doctest::Approx(0.372707838853438).epsilon(1e-5));

    ContourRule r5 = make_rule(5.0, h, pi / 12, 1.0);
    GridFunction E5 = exp_factor(tau, r5, fem).value;
    double b5 = error_constant(5.0, pi / 12, 1.0, 1.0) * std::exp(-2 * pi * (pi / 12) / h);
    CHECK(mass_norm(fem, E5.values) <= 1e-15 + std::exp(-5 * pi * pi) * mass_norm(fem, tau.values) + b5);

    ComplexGridFunction full = exp_factor_full(tau, r01, fem);
    double re = 0, im = 0;
    for (const cplx& v : full.values) {
        re = std::max(re, std::abs(v.real()));
        im = std::max(im, std::abs(v.imag()));
    }
    CHECK(im <= 1e-12 * re);
    for (int i = 0; i < m.n(); ++i) CHECK(full.values[i].real() == doctest::Approx(E.values[i]).epsilon(1e-10));
}

TEST_CASE("contour exponential is L2 stable")
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    Mesh1D m{128, 1.0, 2};
    FemFactor fem = FemFactor::build(m);
    GridFunction tau{m, std::vector<double>(m.n())};
    for (auto& v : tau.values) v = nd(rng);
    double h = 0.2;
    for (double alpha : {0.05, 0.1, 0.5, 1.0, 3.0}) {
        GridFunction E = exp_factor(tau, make_rule(alpha, h, pi / 12, 1.0), fem).value;
        double budget = error_constant(alpha, pi / 12, 1.0, 1.0) * std::exp(-2 * pi * (pi / 12) / h);
        CHECK(mass_norm(fem, E.values) <= (1 + budget) * mass_norm(fem, tau.values));
    }
}
