#include "tsolve/spectral_pipeline.hpp"

#include "tsolve/contour_quad.hpp"
#include "tsolve/errors.hpp"
#include "tsolve/resolvent_solver.hpp"
#include "tsolve/tensor_format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsolve {

using std::numbers::pi;

double SchemeParameters::c_under_for(double lambda_min) const
{
    return c_under > 0 ? c_under : default_c_under(lambda_min);
}

double SchemeParameters::c8_for_order() const { return c8 > 0 ? c8 : default_c8(element_order); }

void validate(const SchemeParameters& p, double lambda_min)
{
    if (!(p.zeta > 0 && p.zeta <= 2)) throw DomainError("zeta must lie in (0, 2]");
    if (!(p.A1 >= 1)) throw DomainError("A1 must be >= 1");
    if (!(p.a_under > 0 && p.a_under < pi)) throw DomainError("a_under must lie in (0, pi)");
    if (!(p.c6 > 0)) throw DomainError("c6 must be positive");
    if (!(p.Cbar0 > 0)) throw DomainError("Cbar0 must be positive");
    if (!(p.rho_bar > 0)) throw DomainError("rho_bar must be positive");
    if (p.element_order != 1 && p.element_order != 2) throw DomainError("element_order must be 1 or 2");
    if (!validate_strip(p.b, p.c_under_for(lambda_min), lambda_min))
        throw DomainError("strip condition fails: need 0 < b < pi/6, cos(pi/6 - b) + c_under < lambda_min, "
                          "c_under <= lambda_min/2");
}

ExpSum operator_expsum(int r, double lambda_min, bool clipped, bool polish)
{
    ExpSum s = rescale(build_expsum(r, polish), lambda_min);
    return clipped ? clip(s) : s;
}

TensorSum approx_inverse_apply(const SeparableOperator& op, const TensorSum& g, const ExpSum& s)
{
    return apply_expsum(op, g, s);
}

TensorSum approx_inverse_apply(const SeparableOperator& op, const TensorSum& g, int r, bool clipped)
{
    return apply_expsum(op, g, operator_expsum(r, op.lambda_min(), clipped));
}

double c0_constant(double lambda_min) { return std::max(8.0, 2.0 / lambda_min); }

double operator_error_bound(int r, double xi, double lambda_min)
{
    if (xi < 0 || xi > 2) throw DomainError("operator_error_bound: xi must lie in [0, 2]");
    return c0_constant(lambda_min) * std::exp(-(2 - xi) * pi * std::sqrt(double(std::max(r, 0))) / 2);
}

int choose_r(const GrowthClass& gamma, double eps, double A1)
{
    if (!(eps > 0)) throw DomainError("choose_r: eps must be positive");
    const double target = 4 * A1 / eps;
    const double thr = target * (1 - 1e-12);
    // Start near the continuous inverse and step to the smallest admissible integer.
    int r = std::max(1, int(std::floor(gamma.inverse(target))) - 2);
    for (int guard = 0; guard < 1000000; ++guard) {
        if (gamma.gamma(r) >= thr) {
            while (r > 1 && gamma.gamma(r - 1) >= thr) --r;
            return r;
        }
        ++r;
    }
    throw DomainError("choose_r: growth sequence does not reach 4 A1 / eps");
}

int choose_R(const GrowthClass& gamma, int r, const SchemeParameters& p)
{
    const double c1 = 4.0 / std::pow(p.a_under * p.zeta, 2);
    const double lg = std::log(p.Cbar0 * gamma.gamma(r));
    const double x = c1 * lg * lg * (lg > 0 ? 1.0 : 0.0);
    int R = int(std::ceil(x - 1e-9 * std::max(1.0, x)));
    return std::max(1, R);
}

std::size_t count_parameters(const TensorSum& u) { return sparsity_cost(u); }

SpectralSolution solve_spectral(const SeparableOperator& op, const TensorSum& f,
                                const std::function<TensorSum(int)>& approx, const GrowthClass& gamma, double eps,
                                const SchemeParameters& p, bool clipped, bool with_oracle)
{
    SpectralSolution out;
    SpectralReport& rep = out.report;
    const double lmin = op.lambda_min();
    rep.r = choose_r(gamma, eps, p.A1);
    rep.R = choose_R(gamma, rep.r, p);
    rep.c0 = c0_constant(lmin);
    TensorSum g = approx(rep.r);
    ExpSum s = operator_expsum(rep.R, lmin, clipped);
    rep.alpha_min = INFINITY;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.weights[k] > 0) rep.alpha_min = std::min(rep.alpha_min, s.nodes[k]);
    out.u = approx_inverse_apply(op, g, s);
    rep.rank = out.u.rank();
    rep.parameter_count = count_parameters(out.u);
    rep.sparsity = sparsity_cost(out.u);
    rep.trip_t2 = tripnorm_upper(op, out.u, p.t + 2);
    rep.trip_t2_zeta = tripnorm_upper(op, out.u, p.t + 2 + p.zeta);
    rep.trip_g_zeta = tripnorm_upper(op, g, p.t + p.zeta);
    rep.inverse_bound = p.Cbar0 * std::exp(-p.a_under * p.zeta * std::sqrt(double(rep.R)) / 2) * rep.trip_g_zeta;

    if (with_oracle) {
        try {
            rep.residual_data = ht_norm(op, difference(f, g), p.t);
            auto modes = product_support(concat(f, g));
            // Sum of f, g and u supports; u shares g's supports.
            CoefficientBlock uf = apply_power(op, to_block(f, modes, kEnumerationCap), -1.0);
            CoefficientBlock ug = apply_power(op, to_block(g, modes, kEnumerationCap), -1.0);
            CoefficientBlock ub = to_block(out.u, modes, kEnumerationCap);
            CoefficientBlock e = uf, ei = ug;
            for (std::size_t i = 0; i < e.size(); ++i) {
                e.values[i] -= ub.values[i];
                ei.values[i] -= ub.values[i];
            }
            rep.err_t2 = ht_norm(op, e, p.t + 2);
            rep.err_l2 = ht_norm(op, e, 0.0);
            rep.err_h1 = ht_norm(op, e, 1.0);
            rep.err_inverse = ht_norm(op, ei, p.t + 2);
        } catch (const CapacityError&) {
            rep.err_t2 = rep.err_l2 = rep.err_h1 = rep.err_inverse = -1;
        }
    }
    return out;
}

} // namespace tsolve
