#include "helpers.hpp"

#include "tsolve/errors.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/spectral_pipeline.hpp"
#include "tsolve/tensor_format.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace tsolve;
using std::numbers::pi;

TEST_CASE("dense inverse solve")
{
    SeparableOperator op = laplacian_operator(2, 8);
    CoefficientBlock u = dense_inverse_solve(op, dense_block(basis_tensor({1, 1}), 4));
    CHECK(u.values[0] == doctest::Approx(0.0506605918211689).epsilon(1e-13));
    for (std::size_t i = 1; i < u.size(); ++i) CHECK(u.values[i] == 0.0);

    CoefficientBlock z = dense_block(basis_tensor({1, 1}), 4);
    std::fill(z.values.begin(), z.values.end(), 0.0);
    for (double v : dense_inverse_solve(op, z).values) CHECK(v == 0.0);

    std::mt19937_64 rng(51);
    SeparableOperator op3 = laplacian_operator(3, 16);
    CoefficientBlock f = dense_block(testutil::random_sum(rng, 3, 16, 2), 16);
    CoefficientBlock back = dense_inverse_solve(op3, dense_forward(op3, f));
    double mx = 0, dev = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        mx = std::max(mx, std::abs(f.values[i]));
        dev = std::max(dev, std::abs(back.values[i] - f.values[i]));
    }
    CHECK(dev <= 1e-14 * mx);
    CHECK_THROWS_AS(dense_block(basis_tensor({1, 1, 1, 1, 1}), 40), CapacityError);
}

TEST_CASE("pointwise exact solution")
{
    SeparableOperator op = laplacian_operator(2, 8);
    TensorSum e = basis_tensor({1, 1});
    CHECK(eigen_exact_pointwise(op, e, {0.5, 0.5}) == doctest::Approx(0.101321183642338).epsilon(1e-13));
    CHECK(eigen_exact_pointwise(op, e, {0.0, 0.3}) == doctest::Approx(0.0).epsilon(1e-16));
    CHECK(std::abs(eigen_exact_pointwise(op, e, {0.4, 1.0})) < 1e-16);

    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    TensorSum f2 = testutil::random_sum(rng, 2, 8, 2);
    CoefficientBlock u2 = dense_inverse_solve(op, dense_block(f2, 8));
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x{ux(rng), ux(rng)};
        CHECK(eigen_exact_pointwise(op, f2, x) == doctest::Approx(synthesize_pointwise(op, u2, x)).epsilon(1e-12));
    }

    // d = 8 with 5 modes per factor keeps the product support under the enumeration cap.
    SeparableOperator op8 = laplacian_operator(8, 8);
    TensorSum f8 = testutil::random_sum(rng, 8, 5, 1);
    for (int i = 0; i < 3; ++i) {
        std::vector<double> x(8);
        for (auto& v : x) v = ux(rng);
        double a = eigen_exact_pointwise(op8, f8, x), b = eigen_exact_pointwise(op8, f8, x, true);
        CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)));
    }
    TensorSum big = testutil::random_sum(rng, 8, 8, 1);
    CHECK_THROWS_AS(eigen_exact_pointwise(op8, big, std::vector<double>(8, 0.5)), CapacityError);
}

TEST_CASE("matrix exponential oracles")
{
    Mesh1D m{64, 1.0, 1};
    FemFactor fem = FemFactor::build(m);
    std::mt19937_64 rng(53);
    std::normal_distribution<double> nd;
    std::vector<double> v(m.n());
    for (auto& x : v) x = nd(rng);
    std::vector<double> same = dense_matrix_exponential(fem, 0.0, v);
    for (int i = 0; i < m.n(); ++i) CHECK(same[i] == doctest::Approx(v[i]).epsilon(1e-13));

    int n = m.n();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
            K(i, j) = fem.K(i, j);
            M(i, j) = fem.M(i, j);
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) phi[i] = es.eigenvectors()(i, 0);
    std::vector<double> ephi = dense_matrix_exponential(fem, 0.3, phi);
    double s = std::exp(-0.3 * es.eigenvalues()(0));
    for (int i = 0; i < n; ++i) CHECK(ephi[i] == doctest::Approx(s * phi[i]).epsilon(1e-10));

    Mesh1D m512{513, 1.0, 1};
    FemFactor f512 = FemFactor::build(m512);
    std::vector<double> w(m512.n());
    for (auto& x : w) x = nd(rng);
    std::vector<double> a = dense_matrix_exponential(f512, 0.5, w), b = pade_matrix_exponential(f512, 0.5, w);
    double dev = 0, mx = 0;
    for (int i = 0; i < m512.n(); ++i) {
        dev = std::max(dev, std::abs(a[i] - b[i]));
        mx = std::max(mx, std::abs(b[i]));
    }
    CHECK(dev <= 1e-10 * std::max(1.0, mx));
}

TEST_CASE("Laplace quadrature agrees with enumeration")
{
    std::mt19937_64 rng(54);
    for (int d : {2, 3}) {
        SeparableOperator op = laplacian_operator(d, 32);
        TensorSum f = testutil::random_sum(rng, d, 10, 2);
        CHECK(f_dot_u(op, f) == doctest::Approx(f_dot_u_enumerated(op, f)).epsilon(1e-12));
        CoefficientBlock u = apply_inverse_dense(op, f);
        double nu = 0;
        for (double v : u.values) nu += v * v;
        CHECK(u_norm_sq(op, f) == doctest::Approx(nu).epsilon(1e-12));
    }
    CHECK(laplace_integral([](double t) { return std::exp(-3 * t); }, 1.0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

// int grad u . grad v over the unit square on a tensor Gauss grid, element by element.
static double dense_h1(const TensorSum& u)
{
    auto eval = [](const GridFunction& g, double x, double& val, double& der) {
        const Mesh1D& m = g.mesh;
        double H = m.hsize();
        int e = std::min(m.elements - 1, int(x / H));
        double xi = x / H - e, phi[3], dphi[3];
        shape(m.order, xi, phi, dphi);
        val = der = 0;
        for (int a = 0; a <= m.order; ++a) {
            int gi = m.order * e + a - 1;
            if (gi < 0 || gi >= m.n()) continue;
            val += g.values[gi] * phi[a];
            der += g.values[gi] * dphi[a] / H;
        }
    };
    GaussRule gr = gauss_legendre(5);
    auto pts = [&](const Mesh1D& m) {
        std::vector<std::pair<double, double>> p;
        for (int e = 0; e < m.elements; ++e)
            for (std::size_t q = 0; q < gr.x.size(); ++q) p.push_back({(e + gr.x[q]) * m.hsize(), gr.w[q] * m.hsize()});
        return p;
    };
    auto px = pts(u.terms[0].nodal[0].mesh), py = pts(u.terms[0].nodal[1].mesh);
    double s = 0;
    for (auto [x, wx] : px)
        for (auto [y, wy] : py) {
            double gx = 0, gy = 0;
            for (const auto& t : u.terms) {
                double a, da, b, db;
                eval(t.nodal[0], x, a, da);
                eval(t.nodal[1], y, b, db);
                gx += da * b;
                gy += a * db;
            }
            s += wx * wy * (gx * gx + gy * gy);
        }
    return s;
}

TEST_CASE("factorized H1 form agrees with 2D quadrature")
{
    std::mt19937_64 rng(55);
    std::normal_distribution<double> nd;
    SeparableOperator op = laplacian_operator(2, 8);
    for (int order : {1, 2}) {
        TensorSum u;
        u.d = 2;
        u.rep = Representation::nodal;
        for (int k = 0; k < 2; ++k) {
            std::vector<GridFunction> f;
            for (int j = 0; j < 2; ++j) {
                Mesh1D m{10 + 3 * j, 1.0, order};
                GridFunction g{m, std::vector<double>(m.n())};
                for (auto& v : g.values) v = nd(rng);
                f.push_back(g);
            }
            u.push(RankOneTerm::grid(f));
        }
        CHECK(energy_inner(op, u, u) == doctest::Approx(dense_h1(u)).epsilon(1e-8));
    }
}

TEST_CASE("error norms")
{
    ExactProblem zero;
    zero.op = laplacian_operator(2, 16);
    zero.f.d = 2;
    TensorSum none;
    none.d = 2;
    none.rep = Representation::nodal;
    Mesh1D m{8, 1.0, 2};
    none.push(RankOneTerm::grid({GridFunction{m, std::vector<double>(m.n(), 0.0)}, GridFunction{m, std::vector<double>(m.n(), 0.0)}}));
    ErrorNorms z = error_norms(zero, none);
    CHECK(z.h1 == 0.0);
    CHECK(z.l2 == 0.0);

    // f = e_(1,1): u = e_(1,1) / (2 pi^2), approximated by interpolants of increasing resolution.
    ExactProblem ex;
    ex.op = laplacian_operator(2, 16);
    ex.f = basis_tensor({1, 1});
    auto mode = [](double x) { return std::sqrt(2.0) * std::sin(pi * x) / std::sqrt(2 * pi * pi); };
    auto approx = [&](int el) {
        TensorSum a;
        a.d = 2;
        a.rep = Representation::nodal;
        Mesh1D mm{el, 1.0, 2};
        a.push(RankOneTerm::grid({interpolate(mm, mode), interpolate(mm, mode)}));
        return a;
    };
    ErrorNorms e8 = error_norms(ex, approx(8)), e32 = error_norms(ex, approx(32));
    CHECK(e32.h1 < e8.h1 / 10);
    CHECK(e8.exact_h1 == doctest::Approx(1 / std::sqrt(2 * pi * pi)).epsilon(1e-12));

    // Triangle inequality through the energy form.
    TensorSum b = approx(8), c = approx(16);
    for (auto& g : b.terms[0].nodal) g = transfer(g, c.terms[0].nodal[0].mesh);
    TensorSum bc = difference(b, c);
    double dbc = std::sqrt(std::max(0.0, energy_inner(ex.op, bc, bc)));
    CHECK(error_norms(ex, c).h1 <= error_norms(ex, b).h1 + dbc + 1e-12);

    // Spectral approximation of the same pair with r = 36; same norm on both sides.
    SeparableOperator op = laplacian_operator(2, 16);
    CoefficientBlock exact = dense_inverse_solve(op, dense_block(ex.f, 2));
    CoefficientBlock ap = to_block(approx_inverse_apply(op, ex.f, 36, false), exact.modes, 16);
    double err = std::abs(exact.values[0] - ap.values[0]);
    CHECK(err <= operator_error_bound(36, 0.0, 2 * pi * pi) * ht_norm(op, ex.f, 0.0));
}

TEST_CASE("sine projection of x(1-x)")
{
    FactorSpectrum f = dirichlet_laplacian_factor(64, 1.0);
    SparseVec c = project_sine([](double x) { return x * (1 - x); }, f, 9);
    for (int k = 1; k <= 9; ++k) {
        double expect = k % 2 ? 4 * std::sqrt(2.0) / std::pow(k * pi, 3) : 0.0;
        CHECK(c.at(k) == doctest::Approx(expect).epsilon(1e-12));
    }
}
