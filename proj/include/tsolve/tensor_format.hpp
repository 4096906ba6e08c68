#pragma once

#include "tsolve/separable_model.hpp"
#include "tsolve/tensor.hpp"

namespace tsolve {

// Per-factor mass matrices are assembled on demand for nodal inner products.
double l2_inner(const TensorSum& u, const TensorSum& v);
double l2_norm(const TensorSum& u);

std::size_t sparsity_cost(const TensorSum& g);

struct RestrictionSet {
    int A = 1;    // R_{m,j} = {1, ..., m^A}
    long long bound(int m) const;
};

bool check_restriction(const TensorSum& g, const RestrictionSet& R);

struct Truncation {
    RankOneTerm term;
    double error_bound = 0;
};

Truncation truncate_rank_one(const SeparableOperator& op, const RankOneTerm& tau, int m,
                             double t, double delta);

double tripnorm_upper(const SeparableOperator& op, const TensorSum& g, double s);

double kfunc_plugin(const SeparableOperator& op, const TensorSum& v, const TensorSum& g,
                    double mu, double t, double zeta);

// Rescales factors of an eigen rank-one term so all have equal L2 norm.
RankOneTerm balance(const RankOneTerm& tau);

struct SandwichBounds {
    double lower = 0;
    double value = 0;
    double upper = 0;
};

SandwichBounds rank_one_sandwich(const SeparableOperator& op, const RankOneTerm& tau, double s);

} // namespace tsolve
