#include "tsolve/tensor_format.hpp"

#include "tsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tsolve {

double SparseVec::at(int mode) const
{
    auto it = std::lower_bound(idx.begin(), idx.end(), mode);
    if (it == idx.end() || *it != mode) return 0.0;
    return val[std::size_t(it - idx.begin())];
}

double SparseVec::dot(const SparseVec& o) const
{
    double s = 0;
    std::size_t i = 0, j = 0;
    while (i < nnz() && j < o.nnz()) {
        if (idx[i] < o.idx[j]) ++i;
        else if (idx[i] > o.idx[j]) ++j;
        else s += val[i++] * o.val[j++];
    }
    return s;
}

double SparseVec::norm() const { return std::sqrt(dot(*this)); }

SparseVec SparseVec::unit(int mode, double v) { return SparseVec{{mode}, {v}}; }

SparseVec SparseVec::dense(const std::vector<double>& coeffs)
{
    SparseVec s;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        s.idx.push_back(int(k) + 1);
        s.val.push_back(coeffs[k]);
    }
    return s;
}

RankOneTerm RankOneTerm::eigen(std::vector<SparseVec> f)
{
    RankOneTerm t;
    t.rep = Representation::eigen;
    t.eig = std::move(f);
    return t;
}

RankOneTerm RankOneTerm::grid(std::vector<GridFunction> f)
{
    RankOneTerm t;
    t.rep = Representation::nodal;
    t.nodal = std::move(f);
    return t;
}

void TensorSum::push(RankOneTerm t)
{
    if (terms.empty() && d == 0) {
        d = int(t.d());
        rep = t.rep;
    }
    if (int(t.d()) != d || t.rep != rep) throw DomainError("tensor sum terms must share d and representation");
    terms.push_back(std::move(t));
}

TensorSum basis_tensor(const std::vector<int>& nu)
{
    std::vector<SparseVec> f;
    for (int k : nu) f.push_back(SparseVec::unit(k));
    TensorSum s;
    s.push(RankOneTerm::eigen(std::move(f)));
    return s;
}

TensorSum scaled(const TensorSum& v, double c)
{
    TensorSum out = v;
    for (auto& t : out.terms) {
        if (t.rep == Representation::eigen) {
            for (auto& x : t.eig[0].val) x *= c;
        } else {
            for (auto& x : t.nodal[0].values) x *= c;
        }
    }
    return out;
}

TensorSum concat(const TensorSum& a, const TensorSum& b)
{
    if (a.terms.empty()) return b;
    if (b.terms.empty()) return a;
    if (a.d != b.d || a.rep != b.rep) throw DomainError("concat: mismatched tensor sums");
    TensorSum out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

TensorSum difference(const TensorSum& a, const TensorSum& b) { return concat(a, scaled(b, -1.0)); }

std::vector<std::vector<int>> product_support(const TensorSum& v)
{
    if (v.rep != Representation::eigen) throw DomainError("product_support: eigen representation required");
    std::vector<std::set<int>> s(v.d);
    for (const auto& t : v.terms)
        for (int j = 0; j < v.d; ++j) s[j].insert(t.eig[j].idx.begin(), t.eig[j].idx.end());
    std::vector<std::vector<int>> out(v.d);
    for (int j = 0; j < v.d; ++j) out[j].assign(s[j].begin(), s[j].end());
    return out;
}

std::size_t product_size(const std::vector<std::vector<int>>& modes)
{
    double p = 1;
    for (const auto& m : modes) p *= double(m.size());
    return p > 1e18 ? std::size_t(-1) : std::size_t(p);
}

CoefficientBlock to_block(const TensorSum& v, std::size_t cap) { return to_block(v, product_support(v), cap); }

CoefficientBlock to_block(const TensorSum& v, const std::vector<std::vector<int>>& modes, std::size_t cap)
{
    if (v.rep != Representation::eigen) throw DomainError("to_block: eigen representation required");
    std::size_t n = product_size(modes);
    if (n > cap)
        throw CapacityError("coefficient block of " + std::to_string(n) + " entries exceeds cap " + std::to_string(cap));
    CoefficientBlock b;
    b.modes = modes;
    b.values.assign(n, 0.0);
    const int d = int(modes.size());
    // dense[term][j][pos]
    std::vector<std::vector<std::vector<double>>> dense(v.rank(), std::vector<std::vector<double>>(d));
    for (std::size_t k = 0; k < v.rank(); ++k)
        for (int j = 0; j < d; ++j) {
            auto& row = dense[k][j];
            row.resize(modes[j].size());
            for (std::size_t p = 0; p < modes[j].size(); ++p) row[p] = v.terms[k].eig[j].at(modes[j][p]);
        }
    b.for_each([&](std::size_t flat, const std::vector<int>& pos) {
        double s = 0;
        for (std::size_t k = 0; k < v.rank(); ++k) {
            double p = 1;
            for (int j = 0; j < d && p != 0; ++j) p *= dense[k][j][pos[j]];
            s += p;
        }
        b.values[flat] = s;
    });
    return b;
}

double l2_inner(const TensorSum& u, const TensorSum& v)
{
    if (u.terms.empty() || v.terms.empty()) return 0.0;
    if (u.rep != v.rep || u.d != v.d) throw DomainError("l2_inner: representation or dimension mismatch");
    double s = 0;
    if (u.rep == Representation::eigen) {
        for (const auto& a : u.terms)
            for (const auto& b : v.terms) {
                double p = 1;
                for (int j = 0; j < u.d; ++j) p *= a.eig[j].dot(b.eig[j]);
                s += p;
            }
        return s;
    }
    std::vector<std::pair<Mesh1D, BandedSym>> mass;
    auto mass_for = [&](const Mesh1D& m) -> const BandedSym& {
        for (const auto& e : mass)
            if (e.first == m) return e.second;
        mass.emplace_back(m, assemble_mass(m));
        return mass.back().second;
    };
    for (const auto& a : u.terms)
        for (const auto& b : v.terms) {
            double p = 1;
            for (int j = 0; j < u.d; ++j) {
                if (!(a.nodal[j].mesh == b.nodal[j].mesh)) throw DomainError("l2_inner: nodal meshes differ");
                p *= mass_for(a.nodal[j].mesh).dot(a.nodal[j].values, b.nodal[j].values);
            }
            s += p;
        }
    return s;
}

double l2_norm(const TensorSum& u) { return std::sqrt(std::max(0.0, l2_inner(u, u))); }

std::size_t sparsity_cost(const TensorSum& g)
{
    std::size_t c = 0;
    for (const auto& t : g.terms)
        for (std::size_t j = 0; j < t.d(); ++j)
            c += t.rep == Representation::eigen ? t.eig[j].nnz() : std::size_t(t.nodal[j].mesh.n());
    return c;
}

long long RestrictionSet::bound(int m) const
{
    double b = std::pow(double(m), A);
    return b > 9e18 ? (long long)9e18 : (long long)std::llround(b);
}

bool check_restriction(const TensorSum& g, const RestrictionSet& R)
{
    if (g.rep != Representation::eigen) throw DomainError("check_restriction: eigen representation required");
    for (const auto& t : g.terms)
        for (const auto& f : t.eig) {
            int m = int(f.nnz());
            for (int k : f.idx)
                if (k < 1 || k > R.bound(m)) return false;
        }
    return true;
}

Truncation truncate_rank_one(const SeparableOperator& op, const RankOneTerm& tau, int m, double t, double delta)
{
    if (tau.rep != Representation::eigen) throw DomainError("truncate_rank_one: eigen representation required");
    if (!(delta > 0)) throw DomainError("truncate_rank_one: delta must be positive");
    if (m < 1) throw DomainError("truncate_rank_one: m must be positive");
    double lstar = INFINITY;
    for (const auto& f : op.factors) {
        if (m + 1 > f.modes()) throw DomainError("truncate_rank_one: m exceeds available modes");
        lstar = std::min(lstar, f.lambda(m + 1));
    }
    Truncation out;
    out.term = tau;
    for (auto& f : out.term.eig) {
        SparseVec k;
        for (std::size_t i = 0; i < f.nnz(); ++i)
            if (f.idx[i] <= m) {
                k.idx.push_back(f.idx[i]);
                k.val.push_back(f.val[i]);
            }
        f = std::move(k);
    }
    TensorSum full;
    full.push(tau);
    out.error_bound = std::pow(lstar, -delta / 2) * ht_norm(op, full, t + delta);
    return out;
}

double tripnorm_upper(const SeparableOperator& op, const TensorSum& g, double s)
{
    if (g.terms.empty()) return 0.0;
    double m = ht_norm(op, g, s);
    for (const auto& t : g.terms) {
        TensorSum one;
        one.push(t);
        m = std::max(m, ht_norm(op, one, s));
    }
    return m;
}

double kfunc_plugin(const SeparableOperator& op, const TensorSum& v, const TensorSum& g, double mu, double t,
                    double zeta)
{
    if (!(mu > 0)) throw DomainError("kfunc_plugin: mu must be positive");
    return ht_norm(op, difference(v, g), t) + mu * tripnorm_upper(op, g, t + zeta);
}

RankOneTerm balance(const RankOneTerm& tau)
{
    if (tau.rep != Representation::eigen) throw DomainError("balance: eigen representation required");
    RankOneTerm out = tau;
    const int d = int(tau.d());
    double logprod = 0;
    std::vector<double> n(d);
    for (int j = 0; j < d; ++j) {
        n[j] = tau.eig[j].norm();
        if (n[j] == 0) return out;
        logprod += std::log(n[j]);
    }
    double target = std::exp(logprod / d);
    for (int j = 0; j < d; ++j)
        for (auto& x : out.eig[j].val) x *= target / n[j];
    return out;
}

SandwichBounds rank_one_sandwich(const SeparableOperator& op, const RankOneTerm& tau, double s)
{
    const int d = int(tau.d());
    std::vector<double> l2(d), hs(d);
    for (int j = 0; j < d; ++j) {
        l2[j] = tau.eig[j].norm();
        hs[j] = factor_hs_norm(op.factors[j], tau.eig[j], s);
    }
    SandwichBounds b;
    double sum = 0;
    for (int j = 0; j < d; ++j) {
        double p = hs[j];
        for (int i = 0; i < d; ++i)
            if (i != j) p *= l2[i];
        b.lower = std::max(b.lower, p);
        sum += p;
    }
    b.upper = std::pow(double(d), std::max(0.0, s - 1) / 2) * sum;
    TensorSum one;
    one.push(tau);
    b.value = ht_norm(op, one, s);
    return b;
}

} // namespace tsolve
