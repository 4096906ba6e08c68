#pragma once

#include "tsolve/expsum.hpp"
#include "tsolve/tensor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace tsolve {

inline constexpr std::size_t kEnumerationCap = 1'000'000;

struct FactorSpectrum {
    std::vector<double> eigenvalues;                 // lambda_{j,1..m}, nondecreasing
    double length = 1.0;
    double kappa = 1.0;                              // coefficient scaling, -kappa u''
    std::function<double(int, double)> evaluator;    // (mode k >= 1, x) -> e_k(x)

    int modes() const { return int(eigenvalues.size()); }
    double lambda(int k) const;                      // 1-based
};

FactorSpectrum dirichlet_laplacian_factor(int n_modes, double L);
FactorSpectrum explicit_factor(std::vector<double> eigenvalues);

// Max deviation of the Gram matrix of the first m modes from I, by quadrature.
double orthonormality_defect(const FactorSpectrum& f, int m);

struct SeparableOperator {
    std::vector<FactorSpectrum> factors;

    int d() const { return int(factors.size()); }
    double lambda_min() const;    // sum_j lambda_{j,1}
    bool normalized() const { return lambda_min() >= 1.0; }
};

SeparableOperator laplacian_operator(int d, int n_modes, double L = 1.0);
void validate(const SeparableOperator& op);

double lambda_nu(const SeparableOperator& op, const std::vector<int>& nu);

// (sum_k lambda_k^s c_k^2)^{1/2} on one factor.
double factor_hs_norm(const FactorSpectrum& f, const SparseVec& v, double s);

double ht_norm(const SeparableOperator& op, const TensorSum& v, double t,
               std::size_t cap = kEnumerationCap);
double ht_norm(const SeparableOperator& op, const CoefficientBlock& b, double t);

TensorSum apply_exp(const SeparableOperator& op, const TensorSum& v, double alpha);
TensorSum apply_expsum(const SeparableOperator& op, const TensorSum& v, const ExpSum& s);
CoefficientBlock apply_inverse_dense(const SeparableOperator& op, const TensorSum& v,
                                     std::size_t cap = kEnumerationCap);
// Multiplies each entry by lambda_nu^p.
CoefficientBlock apply_power(const SeparableOperator& op, const CoefficientBlock& b, double p);

struct RotationPreprocess {
    Eigen::MatrixXd Q;
    Eigen::VectorXd D;
};

// A = Q^T diag(D) Q with rows of Q sign-normalized.
RotationPreprocess rotate_spd(const Eigen::MatrixXd& A);
// Scales factor k by D_k.
SeparableOperator apply_rotation(const SeparableOperator& op, const RotationPreprocess& rot);

} // namespace tsolve
