#include "tsolve/scheme_exp.hpp"

#include "tsolve/contour_quad.hpp"
#include "tsolve/errors.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/parallel.hpp"
#include "tsolve/resolvent_solver.hpp"
#include "tsolve/tensor_format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace tsolve {

using std::numbers::pi;

double scheme_delta(double eps, int d, double rho_bar) { return std::min(1e-2, std::pow(eps / d, rho_bar) / 10); }

Mesh1D scheme_mesh(const SeparableOperator& op, int j, double eps, const SchemeParameters& params)
{
    double delta = scheme_delta(eps, op.d(), params.rho_bar);
    double zeta_eff = std::min(params.zeta, double(params.element_order));
    return mesh_for_target(delta, zeta_eff, params.c8_for_order(), params.element_order, op.factors[j].length);
}

long long nominal_solve_count(int N, int rank, int R, int d) { return (2LL * N + 1) * rank * R * d; }

double work_estimate(const SolveReport& report) { return report.flops; }

SchemeResult run_scheme_exp(const SeparableOperator& op, const TensorSum& g_r, double eps,
                            const SchemeParameters& params, const GrowthClass& gamma)
{
    auto t0 = std::chrono::steady_clock::now();
    const int d = op.d();
    if (params.zeta < 1 || params.zeta > 2)
        throw ConfigError("params.zeta", "Scheme-Exp needs 1 <= zeta <= 2: the L2 accuracy of the factor "
                                         "exponentials follows from the energy accuracy by duality only there");
    if (!(eps > 0)) throw ConfigError("eps", "eps must be positive");
    const double lmin = op.lambda_min();
    validate(params, lmin);
    for (const auto& f : op.factors)
        if (!f.evaluator) throw DomainError("Scheme-Exp needs differential factors with an interval length");
    if (!g_r.terms.empty() && (g_r.rep != Representation::nodal || g_r.d != d))
        throw DomainError("Scheme-Exp expects nodal data of matching dimension");

    SchemeResult out;
    SolveReport& rep = out.report;
    rep.d = d;
    rep.eps = eps;
    rep.params = params;
    rep.growth = gamma.describe();
    rep.r = choose_r(gamma, eps, params.A1);
    rep.R = choose_R(gamma, rep.r, params);
    rep.h = choose_h(eps, d, params.c6);
    rep.delta = scheme_delta(eps, d, params.rho_bar);
    if (rep.delta < 1e-13) throw ConfigError("eps", "resolvent accuracy budget falls below floating-point resolution");
    rep.zeta_eff = std::min(params.zeta, double(params.element_order));
    rep.rank_in = g_r.rank();

    GrowthCheck gc = check_growth(gamma);
    rep.cbar = gc.cbar;
    const double cbar2 = 4 * params.Cbar0 * gc.cbar * params.A1;
    rep.alpha_floor_tr = clip_threshold(rep.R) / lmin;
    rep.alpha_floor_eps = 8 * std::exp(-pi) * std::pow(cbar2 / eps, -2 * pi / (params.zeta * params.a_under)) / lmin;

    ExpSum s = operator_expsum(rep.R, lmin, true);
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.weights[k] > 0) {
            rep.alphas.push_back(s.nodes[k]);
            rep.omegas.push_back(s.weights[k]);
        }
    const int K = int(rep.alphas.size());
    const double c_under = params.c_under_for(lmin);
    std::vector<ContourRule> rules;
    for (int k = 0; k < K; ++k) {
        rules.push_back(make_rule(rep.alphas[k], rep.h, params.b, c_under));
        rep.N_per_term.push_back(rules.back().N);
        rep.N = std::max(rep.N, rules.back().N);
    }

    std::vector<FemFactor> fems;
    for (int j = 0; j < d; ++j) {
        fems.push_back(FemFactor::build(scheme_mesh(op, j, eps, params), op.factors[j].kappa));
    }
    rep.dofs = fems[0].mesh.n();

    out.u.rep = Representation::nodal;
    out.u.d = d;
    // Terms with an identically zero factor contribute nothing.
    std::vector<const RankOneTerm*> live;
    for (const auto& t : g_r.terms) {
        bool zero = false;
        for (const auto& f : t.nodal)
            zero = zero || std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; });
        if (!zero) live.push_back(&t);
    }
    const std::size_t L = live.size();
    if (L == 0 || K == 0) {
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    // Task (l, k, j) in lexicographic order; each owns one slot.
    const std::size_t ntask = L * std::size_t(K) * std::size_t(d);
    std::vector<ExpFactorResult> slots(ntask);
    parallel_for(ntask, [&](std::size_t t) {
        std::size_t j = t % d;
        std::size_t k = (t / d) % K;
        std::size_t l = t / (std::size_t(d) * K);
        slots[t] = exp_factor(live[l]->nodal[j], rules[k], fems[j]);
    });

    for (std::size_t l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            std::vector<GridFunction> fac;
            for (int j = 0; j < d; ++j) {
                auto& res = slots[(l * K + k) * d + j];
                rep.flops += res.flops;
                rep.solves_executed += res.solves;
                fac.push_back(std::move(res.value));
            }
            for (auto& x : fac[0].values) x *= rep.omegas[k];
            out.u.terms.push_back(RankOneTerm::grid(std::move(fac)));
        }
    for (int k = 0; k < K; ++k) rep.solves_nominal += (2LL * rules[k].N + 1) * (long long)L * d;
    rep.rank_out = out.u.rank();
    rep.parameter_count = count_parameters(out.u);
    rep.stability_h1 = nodal_tripnorm_h1(op, out.u);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace tsolve
