#include "tsolve/errors.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/parallel.hpp"
#include "tsolve/scheme_exp.hpp"
#include "tsolve/tensor_format.hpp"
#include "tsolve/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tsolve;
using std::numbers::pi;

static const GrowthClass kExp = GrowthClass::stretched_exponential(1.0, 1.0);

TEST_CASE("solve counts")
{
    CHECK(nominal_solve_count(5, 1, 3, 2) == 66);
    CHECK(nominal_solve_count(5, 1, 3, 4) == 2 * nominal_solve_count(5, 1, 3, 2));
    CHECK(scheme_delta(1e-2, 4, 1.2) == doctest::Approx(std::pow(2.5e-3, 1.2) / 10));
    CHECK(scheme_delta(0.5, 1, 1.2) == 1e-2);
}

TEST_CASE("end to end at d = 2")
{
    SchemeParameters p;
    BenchRow row = run_bench_row(2, 1e-2, p, kExp);
    const SolveReport& r = row.report;
    CHECK(row.errors.h1 <= 10 * 1e-2 * row.surrogate);
    CHECK(row.errors.h1 <= 1e-2 * row.errors.exact_h1);
    CHECK(r.rank_out <= std::size_t(r.r * r.R));
    CHECK(r.rank_out == r.alphas.size());
    CHECK(r.parameter_count == r.rank_out * std::size_t(r.dofs) * 2);
    CHECK(r.solves_executed < r.solves_nominal);
    double floor_eps = r.alpha_floor_eps;
    for (double a : r.alphas) {
        CHECK(a >= r.alpha_floor_tr * (1 - 1e-12));
        CHECK(a >= floor_eps);
    }
    CHECK(r.zeta_eff == 2.0);
}

TEST_CASE("relative H1 error stays below eps")
{
    SchemeParameters p;
    for (int d : {2, 3})
        for (double eps : {0.1, 0.01}) {
            BenchRow row = run_bench_row(d, eps, p, kExp);
            CHECK(row.errors.h1 <= eps * row.errors.exact_h1);
        }
}

TEST_CASE("stability regression")
{
    // A2 measured once over d in {2,3,4}, eps in {0.1, 0.01}: max 0.0506.
    const double A2 = 0.051;
    SchemeParameters p;
    for (int d : {2, 4}) {
        BenchRow row = run_bench_row(d, 0.1, p, kExp);
        ExactProblem ex = poly_bump_problem(d);
        CHECK(row.report.stability_h1 <= A2 * tripnorm_upper(ex.op, ex.f, p.t + p.zeta));
    }
}

TEST_CASE("linear elements")
{
    SchemeParameters p;
    p.element_order = 1;
    BenchRow row = run_bench_row(2, 0.1, p, kExp);
    CHECK(row.report.zeta_eff == 1.0);
    CHECK(row.errors.h1 <= 10 * 0.1 * row.surrogate);
    CHECK(row.errors.h1 <= 0.1 * row.errors.exact_h1);
}

TEST_CASE("zero data")
{
    SeparableOperator op = laplacian_operator(2, 64);
    SchemeParameters p;
    TensorSum g;
    g.d = 2;
    g.rep = Representation::nodal;
    std::vector<GridFunction> f;
    for (int j = 0; j < 2; ++j) {
        Mesh1D m = scheme_mesh(op, j, 0.1, p);
        f.push_back(GridFunction{m, std::vector<double>(m.n(), 0.0)});
    }
    g.push(RankOneTerm::grid(f));
    SchemeResult res = run_scheme_exp(op, g, 0.1, p, kExp);
    CHECK(res.report.solves_executed == 0);
    CHECK(l2_norm(res.u) == 0.0);
}

TEST_CASE("configuration errors")
{
    ExactProblem ex = poly_bump_problem(2);
    SchemeParameters p;
    TensorSum g = nodal_data_on_scheme_mesh(ex, 0.1, p);
    p.zeta = 0.5;
    CHECK_THROWS_AS(run_scheme_exp(ex.op, g, 0.1, p, kExp), ConfigError);
    p.zeta = 2.0;
    CHECK_THROWS_AS(run_scheme_exp(ex.op, g, 1e-14, p, kExp), ConfigError);
    TensorSum e = basis_tensor({1, 1});
    CHECK_THROWS_AS(run_scheme_exp(ex.op, e, 0.1, SchemeParameters{}, kExp), DomainError);
}

TEST_CASE("deterministic across thread counts")
{
    ExactProblem ex = poly_bump_problem(3);
    SchemeParameters p;
    TensorSum g = nodal_data_on_scheme_mesh(ex, 0.1, p);
    set_threads(1);
    SchemeResult a = run_scheme_exp(ex.op, g, 0.1, p, kExp);
    set_threads(4);
    SchemeResult b = run_scheme_exp(ex.op, g, 0.1, p, kExp);
    set_threads(0);
    REQUIRE(a.u.rank() == b.u.rank());
    for (std::size_t k = 0; k < a.u.rank(); ++k)
        for (int j = 0; j < 3; ++j) CHECK(a.u.terms[k].nodal[j].values == b.u.terms[k].nodal[j].values);
}

TEST_CASE("telescoping error decomposition")
{
    // One exponential term at d = 3: || (x)a_j - (x)b_j || <= sum_j |a_j - b_j| prod_{i != j} max(|a_i|, |b_i|).
    const int d = 3;
    const double alpha = 0.02, h = 0.3;
    std::vector<double> err(d), bound(d);
    TensorSum A, B;
    A.d = B.d = d;
    A.rep = B.rep = Representation::nodal;
    std::vector<GridFunction> af, bf;
    for (int j = 0; j < d; ++j) {
        Mesh1D m{24 + 8 * j, 1.0, 2};
        FemFactor fem = FemFactor::build(m, 1.0 + 0.5 * j);
        GridFunction tau = interpolate(m, [j](double x) { return std::pow(x * (1 - x), 1 + j) * std::exp(x); });
        GridFunction a{m, dense_matrix_exponential(fem, alpha, tau.values)};
        GridFunction b = exp_factor(tau, make_rule(alpha, h, pi / 12, 1.0), fem).value;
        std::vector<double> diff(m.n());
        for (int i = 0; i < m.n(); ++i) diff[i] = a.values[i] - b.values[i];
        err[j] = mass_norm(fem, diff);
        bound[j] = std::max(mass_norm(fem, a.values), mass_norm(fem, b.values));
        af.push_back(a);
        bf.push_back(b);
    }
    A.push(RankOneTerm::grid(af));
    B.push(RankOneTerm::grid(bf));
    double full = l2_norm(difference(A, B));
    double tele = 0;
    for (int j = 0; j < d; ++j) {
        double p = err[j];
        for (int i = 0; i < d; ++i)
            if (i != j) p *= bound[i];
        tele += p;
    }
    CHECK(full > 0);
    CHECK(full <= 2 * tele);
}
