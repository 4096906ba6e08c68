#pragma once

#include "tsolve/tensor.hpp"

#include <random>

namespace testutil {

inline tsolve::SparseVec random_vec(std::mt19937_64& rng, int modes)
{
    std::normal_distribution<double> nd;
    std::vector<double> c(modes);
    for (auto& v : c) v = nd(rng);
    return tsolve::SparseVec::dense(c);
}

inline tsolve::RankOneTerm random_term(std::mt19937_64& rng, int d, int modes)
{
    std::vector<tsolve::SparseVec> f;
    for (int j = 0; j < d; ++j) f.push_back(random_vec(rng, modes));
    return tsolve::RankOneTerm::eigen(std::move(f));
}

inline tsolve::TensorSum random_sum(std::mt19937_64& rng, int d, int modes, int rank)
{
    tsolve::TensorSum s;
    s.d = d;
    for (int k = 0; k < rank; ++k) s.push(random_term(rng, d, modes));
    return s;
}

} // namespace testutil
