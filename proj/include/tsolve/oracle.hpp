#pragma once

#include "tsolve/resolvent_solver.hpp"
#include "tsolve/separable_model.hpp"
#include "tsolve/tensor.hpp"

#include <functional>
#include <vector>

namespace tsolve {

inline constexpr std::size_t kDenseCap = std::size_t(1) << 24;

// Block over {1..M}^d.
CoefficientBlock dense_block(const TensorSum& f, int M);
CoefficientBlock dense_inverse_solve(const SeparableOperator& op, const CoefficientBlock& f);
CoefficientBlock dense_forward(const SeparableOperator& op, const CoefficientBlock& f);

double synthesize_pointwise(const SeparableOperator& op, const CoefficientBlock& b, const std::vector<double>& x);
// u(x) = sum_nu lambda_nu^{-1} <f, e_nu> prod_j e_{j,nu_j}(x_j) over the product support of f.
double eigen_exact_pointwise(const SeparableOperator& op, const TensorSum& f, const std::vector<double>& x,
                             bool reverse_order = false);

// exp(-alpha M^{-1} K) v by the generalized symmetric eigendecomposition.
std::vector<double> dense_matrix_exponential(const FemFactor& fem, double alpha, const std::vector<double>& v);
// Same quantity by Pade scaling and squaring on the dense M^{-1} K.
std::vector<double> pade_matrix_exponential(const FemFactor& fem, double alpha, const std::vector<double>& v);
// L2 norm of a nodal vector, sqrt(v^T M v).
double mass_norm(const FemFactor& fem, const std::vector<double>& v);

// int_0^inf t^p g(t) dt by the trapezoid rule in s = log t.
double laplace_integral(const std::function<double(double)>& g, double lambda_min, int p);

// Exact data in eigen form, with optional closed-form factor functions f[term][j].
struct ExactProblem {
    SeparableOperator op;
    TensorSum f;
    std::vector<std::vector<std::function<double(double)>>> functions;
};

double energy_inner(const SeparableOperator& op, const TensorSum& u, const TensorSum& v);   // nodal, b(u,v)
double nodal_tripnorm_h1(const SeparableOperator& op, const TensorSum& u);

struct ErrorNorms {
    double h1 = 0;        // energy norm sqrt(b(e, e))
    double l2 = 0;
    double exact_h1 = 0;  // ||u||_1
    double exact_l2 = 0;
};

// Norms of u - approx where u = B^{-1} f, approx nodal.
ErrorNorms error_norms(const ExactProblem& ex, const TensorSum& approx);

// <f, B^{-1} f> and ||B^{-1} f||^2, by the Laplace transform or by enumeration.
double f_dot_u(const SeparableOperator& op, const TensorSum& f);
double u_norm_sq(const SeparableOperator& op, const TensorSum& f);
double f_dot_u_enumerated(const SeparableOperator& op, const TensorSum& f);

// Sine coefficients of a function on (0, L) against the first M eigenfunctions.
SparseVec project_sine(const std::function<double(double)>& g, const FactorSpectrum& f, int M);

} // namespace tsolve
