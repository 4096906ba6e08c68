#include "helpers.hpp"

#include "tsolve/errors.hpp"
#include "tsolve/expsum.hpp"
#include "tsolve/separable_model.hpp"
#include "tsolve/tensor_format.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tsolve;
using std::numbers::pi;

TEST_CASE("dirichlet factor")
{
    FactorSpectrum f = dirichlet_laplacian_factor(16, 1.0);
    CHECK(f.lambda(1) == doctest::Approx(pi * pi).epsilon(1e-14));
    CHECK(orthonormality_defect(f, 16) < 1e-8);
    FactorSpectrum g = dirichlet_laplacian_factor(8, 2.0);
    CHECK(g.lambda(3) == doctest::Approx(22.2066099024735).epsilon(1e-12));
    CHECK(orthonormality_defect(g, 8) < 1e-8);
    CHECK(f.evaluator(1, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("explicit factor validation")
{
    CHECK_NOTHROW(explicit_factor({1.0, 2.0, 2.0, 5.0}));
    CHECK_THROWS_AS(explicit_factor({2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(explicit_factor({0.0, 1.0}), DomainError);
}

TEST_CASE("lambda_nu")
{
    SeparableOperator op = laplacian_operator(3, 8);
    CHECK(lambda_nu(op, {1, 2, 3}) == doctest::Approx(14 * pi * pi).epsilon(1e-14));
    CHECK(lambda_nu(op, {1, 1, 1}) == doctest::Approx(op.lambda_min()).epsilon(1e-14));
    CHECK(op.lambda_min() == doctest::Approx(3 * pi * pi));

    SeparableOperator ex;
    ex.factors.assign(2, explicit_factor({1, 2, 3, 4}));
    CHECK(lambda_nu(ex, {2, 2}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(lambda_nu(ex, {5, 1}), DomainError);
}

TEST_CASE("ht_norm closed forms")
{
    SeparableOperator op = laplacian_operator(2, 16);
    TensorSum e11 = basis_tensor({1, 1});
    CHECK(ht_norm(op, e11, 1.0) == doctest::Approx(std::sqrt(2 * pi * pi)).epsilon(1e-13));

    std::mt19937_64 rng(11);
    RankOneTerm t = testutil::random_term(rng, 2, 6);
    TensorSum v;
    v.d = 2;
    v.push(t);
    CHECK(ht_norm(op, v, 0.0) == doctest::Approx(t.eig[0].norm() * t.eig[1].norm()).epsilon(1e-13));
}

TEST_CASE("ht_norm Gram formulas agree with enumeration")
{
    std::mt19937_64 rng(12);
    SeparableOperator op = laplacian_operator(3, 16);
    TensorSum v = testutil::random_sum(rng, 3, 4, 2);
    CoefficientBlock b = to_block(v, kEnumerationCap);
    for (double t : {0.0, 1.0, 2.0}) CHECK(ht_norm(op, v, t) == doctest::Approx(ht_norm(op, b, t)).epsilon(1e-12));

    double n15 = ht_norm(op, v, 1.5);
    CHECK(n15 <= std::sqrt(ht_norm(op, v, 1.0) * ht_norm(op, v, 2.0)) * (1 + 1e-12));
    CHECK(ht_norm(op, v, 0.0) <= ht_norm(op, v, 0.5));
    CHECK(ht_norm(op, v, 0.5) <= n15);
    CHECK(ht_norm(op, v, -1.0) <= ht_norm(op, v, 0.0));
}

TEST_CASE("isometry of the forward multiplier")
{
    std::mt19937_64 rng(13);
    SeparableOperator op = laplacian_operator(3, 16);
    TensorSum v = testutil::random_sum(rng, 3, 5, 2);
    CoefficientBlock b = to_block(v, kEnumerationCap);
    CoefficientBlock Bv = apply_power(op, b, 1.0);
    for (double t : {0.0, 1.0, 2.5}) CHECK(ht_norm(op, Bv, t - 2) == doctest::Approx(ht_norm(op, b, t)).epsilon(1e-12));
}

static double coeff(const TensorSum& v, std::vector<int> nu)
{
    double c = 0;
    for (const auto& t : v.terms) {
        double p = 1;
        for (std::size_t j = 0; j < nu.size(); ++j) p *= t.eig[j].at(nu[j]);
        c += p;
    }
    return c;
}

TEST_CASE("diagonal exponential")
{
    SeparableOperator op = laplacian_operator(2, 16);
    TensorSum e11 = basis_tensor({1, 1});
    CHECK(coeff(apply_exp(op, e11, 0.0), {1, 1}) == doctest::Approx(1.0));
    CHECK(coeff(apply_exp(op, e11, 0.1), {1, 1}) == doctest::Approx(0.138911133142800).epsilon(1e-13));

    std::mt19937_64 rng(14);
    TensorSum v = testutil::random_sum(rng, 2, 6, 2);
    TensorSum a = apply_exp(op, apply_exp(op, v, 0.03), 0.05);
    TensorSum b = apply_exp(op, v, 0.08);
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 6; ++j)
            CHECK(coeff(a, {i, j}) == doctest::Approx(coeff(b, {i, j})).epsilon(1e-13));
}

TEST_CASE("expsum action on a single mode")
{
    SeparableOperator op = laplacian_operator(2, 16);
    ExpSum s = rescale(build_expsum(9), 2 * pi * pi);
    TensorSum out = apply_expsum(op, basis_tensor({1, 1}), s);
    CHECK(out.rank() <= s.size());
    double c = coeff(out, {1, 1});
    CHECK(c == doctest::Approx(eval(s, 2 * pi * pi)).epsilon(1e-13));
    CHECK(std::abs(c - 1 / (2 * pi * pi)) <= s.measured_sup_error);
}

TEST_CASE("capacity")
{
    SeparableOperator op = laplacian_operator(8, 16);
    std::mt19937_64 rng(15);
    TensorSum v = testutil::random_sum(rng, 8, 8, 1);
    CHECK_THROWS_AS(ht_norm(op, v, 1.5), CapacityError);
    CHECK_NOTHROW(ht_norm(op, v, 1.0));
}

TEST_CASE("rotation preprocessing")
{
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    RotationPreprocess r = rotate_spd(I);
    CHECK((r.Q - I).norm() < 1e-14);
    CHECK((r.D - Eigen::VectorXd::Ones(3)).norm() < 1e-14);

    Eigen::MatrixXd A(2, 2);
    A << 2, 0, 0, 3;
    r = rotate_spd(A);
    CHECK(r.D(0) == doctest::Approx(2.0));
    CHECK(r.D(1) == doctest::Approx(3.0));
    CHECK((r.Q.cwiseAbs() - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

    A << 2, 1, 1, 2;
    r = rotate_spd(A);
    CHECK(r.D(0) == doctest::Approx(1.0));
    CHECK(r.D(1) == doctest::Approx(3.0));
    Eigen::MatrixXd back = r.Q.transpose() * r.D.asDiagonal() * r.Q;
    CHECK((back - A).norm() < 1e-10);
    CHECK(std::abs(r.Q(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));

    A << 1, 2, 2, 1;
    CHECK_THROWS_AS(rotate_spd(A), DomainError);

    SeparableOperator op = apply_rotation(laplacian_operator(2, 8), rotate_spd((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished()));
    CHECK(op.factors[0].lambda(1) == doctest::Approx(pi * pi));
    CHECK(op.factors[1].lambda(1) == doctest::Approx(3 * pi * pi));
}
