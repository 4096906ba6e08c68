#pragma once

#include "tsolve/expsum.hpp"
#include "tsolve/growth.hpp"
#include "tsolve/separable_model.hpp"
#include "tsolve/tensor.hpp"

#include <functional>
#include <numbers>

namespace tsolve {

struct SchemeParameters {
    double t = -1.0;
    double zeta = 2.0;
    double A1 = 1.0;
    double a_under = 2.5;
    double c6 = 0.6;
    double b = std::numbers::pi / 12;
    double c_under = 0.0;   // <= 0 selects min(1, lambda_min/2)
    double Cbar0 = 10.0;
    double rho_bar = 1.2;
    double M = 1.0;          // resolvent bound used only for C(alpha) reporting
    int element_order = 2;
    double c8 = 0.0;         // <= 0 selects the calibrated default for the order

    double c_under_for(double lambda_min) const;
    double c8_for_order() const;
};

// Throws DomainError naming the offending parameter.
void validate(const SchemeParameters& p, double lambda_min);

// ExpSum on [lambda_min, inf), optionally clipped.
ExpSum operator_expsum(int r, double lambda_min, bool clipped, bool polish = false);

TensorSum approx_inverse_apply(const SeparableOperator& op, const TensorSum& g, int r, bool clipped);
TensorSum approx_inverse_apply(const SeparableOperator& op, const TensorSum& g, const ExpSum& s);

double operator_error_bound(int r, double xi, double lambda_min);
double c0_constant(double lambda_min);

int choose_r(const GrowthClass& gamma, double eps, double A1);
int choose_R(const GrowthClass& gamma, int r, const SchemeParameters& p);

std::size_t count_parameters(const TensorSum& u);

struct SpectralReport {
    int r = 0;
    int R = 0;
    std::size_t rank = 0;
    std::size_t parameter_count = 0;
    std::size_t sparsity = 0;
    double trip_t2 = 0;          // tripnorm_upper(u, t+2)
    double trip_t2_zeta = 0;     // tripnorm_upper(u, t+2+zeta)
    double trip_g_zeta = 0;      // tripnorm_upper(g_r, t+zeta)
    double residual_data = 0;    // ||f - g_r||_t
    double inverse_bound = 0;    // C0 exp(-a zeta sqrt(R)/2) tripnorm(g_r, t+zeta) style ledger
    double err_l2 = -1;          // filled when an oracle is available
    double err_t2 = -1;          // ||u - u_bar||_{t+2}
    double err_h1 = -1;
    double err_inverse = -1;     // ||(B^{-1} - S_R-bar(B)) g_r||_{t+2}
    double c0 = 0;
    double alpha_min = 0;
};

struct SpectralSolution {
    TensorSum u;
    SpectralReport report;
};

// u_bar = S_R-bar(B) g_r. The caller supplies g_r for the selected r through `approx`.
SpectralSolution solve_spectral(const SeparableOperator& op, const TensorSum& f,
                                const std::function<TensorSum(int)>& approx, const GrowthClass& gamma,
                                double eps, const SchemeParameters& p, bool clipped = true,
                                bool with_oracle = true);

} // namespace tsolve
