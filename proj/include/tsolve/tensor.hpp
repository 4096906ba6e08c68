#pragma once

#include "tsolve/fem1d.hpp"

#include <cstddef>
#include <vector>

namespace tsolve {

enum class Representation { eigen, nodal };

// Coefficients on 1-based eigenmode indices, ascending.
struct SparseVec {
    std::vector<int> idx;
    std::vector<double> val;

    std::size_t nnz() const { return idx.size(); }
    double at(int mode) const;
    double dot(const SparseVec& o) const;
    double norm() const;
    static SparseVec unit(int mode, double v = 1.0);
    static SparseVec dense(const std::vector<double>& coeffs);   // modes 1..n
};

struct RankOneTerm {
    Representation rep = Representation::eigen;
    std::vector<SparseVec> eig;
    std::vector<GridFunction> nodal;

    std::size_t d() const { return rep == Representation::eigen ? eig.size() : nodal.size(); }
    static RankOneTerm eigen(std::vector<SparseVec> f);
    static RankOneTerm grid(std::vector<GridFunction> f);
};

struct TensorSum {
    Representation rep = Representation::eigen;
    int d = 0;
    std::vector<RankOneTerm> terms;

    std::size_t rank() const { return terms.size(); }
    void push(RankOneTerm t);
};

TensorSum basis_tensor(const std::vector<int>& nu);   // e_nu, 1-based modes
TensorSum scaled(const TensorSum& v, double c);
TensorSum concat(const TensorSum& a, const TensorSum& b);
TensorSum difference(const TensorSum& a, const TensorSum& b);   // a - b as a longer sum

// Coefficients <v, e_nu> on a product index set.
struct CoefficientBlock {
    std::vector<std::vector<int>> modes;   // per dimension, ascending
    std::vector<double> values;            // last dimension fastest

    int d() const { return int(modes.size()); }
    std::size_t size() const { return values.size(); }
    // Calls f(flat_index, multi_index_positions) over all entries.
    template <class F>
    void for_each(F&& f) const;
};

// Union of per-dimension supports over all terms.
std::vector<std::vector<int>> product_support(const TensorSum& v);
std::size_t product_size(const std::vector<std::vector<int>>& modes);
CoefficientBlock to_block(const TensorSum& v, std::size_t cap);
CoefficientBlock to_block(const TensorSum& v, const std::vector<std::vector<int>>& modes, std::size_t cap);

template <class F>
void CoefficientBlock::for_each(F&& f) const
{
    const int dd = d();
    std::vector<int> pos(dd, 0);
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        f(flat, pos);
        for (int j = dd - 1; j >= 0; --j) {
            if (++pos[j] < int(modes[j].size())) break;
            pos[j] = 0;
        }
    }
}

} // namespace tsolve
