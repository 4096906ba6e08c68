#pragma once

#include "tsolve/contour_quad.hpp"
#include "tsolve/fem1d.hpp"

#include <vector>

namespace tsolve {

// Mesh-size constants C8 per element order from the self-convergence study.
double default_c8(int order);

struct FemFactor {
    Mesh1D mesh;
    double kappa = 1.0;
    BandedSym K;
    BandedSym M;

    static FemFactor build(const Mesh1D& mesh, double kappa = 1.0);
};

struct ComplexGridFunction {
    Mesh1D mesh;
    std::vector<cplx> values;
};

struct ResolventResult {
    ComplexGridFunction u;
    double flops = 0;
};

// Galerkin solve of z<u,v> - b(u,v) = <w,v>, i.e. (zM - K)u = M w.
ResolventResult solve_resolvent(cplx z, const GridFunction& w, const FemFactor& fem);
ResolventResult solve_resolvent(cplx z, const std::vector<cplx>& w, const FemFactor& fem);
// ||(zM - K)u - M w|| / (||zM - K|| ||u|| + ||M w||), infinity norms.
double resolvent_residual(cplx z, const std::vector<cplx>& w, const std::vector<cplx>& u, const FemFactor& fem);

// n = ceil(C8 delta^{-1/zeta}) interior nodes, realized with the given element order.
Mesh1D mesh_for_target(double delta, double zeta, double c8, int order = 1, double L = 1.0);

struct ExpFactorResult {
    GridFunction value;
    double flops = 0;
    int solves = 0;
};

// h (u_0 + 2 Re sum_{q>=1} u_q) with u_q = prefactor_q (z_q - B_j)^{-1} tau.
ExpFactorResult exp_factor(const GridFunction& tau, const ContourRule& rule, const FemFactor& fem);
// Both halves of the contour summed explicitly; used to check the imaginary residue.
ComplexGridFunction exp_factor_full(const GridFunction& tau, const ContourRule& rule, const FemFactor& fem);

// |u - v|_{H^1} between FE functions on different meshes (exact quadrature on the merged partition).
double h1_seminorm_diff(const GridFunction& u, const GridFunction& v);
double l2_diff(const GridFunction& u, const GridFunction& v);
GridFunction real_part(const ComplexGridFunction& u);
GridFunction imag_part(const ComplexGridFunction& u);

} // namespace tsolve
