#pragma once

#include "tsolve/growth.hpp"
#include "tsolve/separable_model.hpp"
#include "tsolve/spectral_pipeline.hpp"
#include "tsolve/tensor.hpp"

#include <vector>

namespace tsolve {

struct SolveReport {
    int d = 0;
    double eps = 0;
    int r = 0;
    int R = 0;
    double h = 0;
    int N = 0;                      // max over retained terms
    std::vector<int> N_per_term;    // per retained exponential term
    std::vector<double> alphas;     // retained alpha_{R,k}
    std::vector<double> omegas;     // retained clipped weights
    double delta = 0;
    double zeta_eff = 0;
    int dofs = 0;                   // per-factor FE dimension (first factor)
    std::size_t rank_in = 0;
    std::size_t rank_out = 0;
    std::size_t parameter_count = 0;
    long long solves_nominal = 0;   // sum_k (2N_k + 1) rank d
    long long solves_executed = 0;  // half contour only
    double flops = 0;
    double alpha_floor_tr = 0;      // 1/T_R
    double alpha_floor_eps = 0;     // 8 e^{-pi} (Cbar2/eps)^{-2pi/(zeta a)}
    double cbar = 0;
    double stability_h1 = 0;       // tripnorm_upper(u_bar, 1)
    double seconds = 0;
    SchemeParameters params;
    std::string growth;
};

struct SchemeResult {
    TensorSum u;   // nodal representation on the solve meshes
    SolveReport report;
};

double scheme_delta(double eps, int d, double rho_bar);
// The factor-j mesh run_scheme_exp will solve on; interpolating data here avoids a transfer.
Mesh1D scheme_mesh(const SeparableOperator& op, int j, double eps, const SchemeParameters& params);
long long nominal_solve_count(int N, int rank, int R, int d);

SchemeResult run_scheme_exp(const SeparableOperator& op, const TensorSum& g_r, double eps,
                            const SchemeParameters& params, const GrowthClass& gamma);

double work_estimate(const SolveReport& report);

} // namespace tsolve
