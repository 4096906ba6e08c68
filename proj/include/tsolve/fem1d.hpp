#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace tsolve {

// Uniform mesh on (0, L) with Dirichlet ends; order 1 or 2 Lagrange elements.
struct Mesh1D {
    int elements = 1;
    double L = 1.0;
    int order = 1;

    int n() const { return order * elements - 1; }    // interior dofs
    double hsize() const { return L / elements; }
    double node(int i) const { return (i + 1) * L / (order * elements); }
    bool operator==(const Mesh1D& o) const
    {
        return elements == o.elements && L == o.L && order == o.order;
    }
};

struct GridFunction {
    Mesh1D mesh;
    std::vector<double> values;
};

// Symmetric band matrix, upper band stored row-wise.
struct BandedSym {
    int n = 0;
    int p = 0;
    std::vector<double> a;

    BandedSym() = default;
    BandedSym(int n_, int p_) : n(n_), p(p_), a(std::size_t(n_) * (p_ + 1), 0.0) {}
    double operator()(int i, int j) const;
    void add(int i, int j, double v);
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<std::complex<double>> multiply(const std::vector<std::complex<double>>& x) const;
    double dot(const std::vector<double>& x, const std::vector<double>& y) const;
    double max_abs() const;
};

BandedSym assemble_stiffness(const Mesh1D& m, double kappa = 1.0);
BandedSym assemble_mass(const Mesh1D& m);

struct GaussRule {
    std::vector<double> x;   // on [0, 1]
    std::vector<double> w;
};
GaussRule gauss_legendre(int npts);

// Reference basis on [0,1]: values and derivatives of the order+1 local shapes.
void shape(int order, double xi, double* phi, double* dphi);

double fe_eval(const GridFunction& g, double x);
GridFunction interpolate(const Mesh1D& m, const std::function<double(double)>& f);
GridFunction transfer(const GridFunction& g, const Mesh1D& target);

// int_0^L f(x) g(x) dx with a Gauss rule per element.
double load_inner(const GridFunction& g, const std::function<double(double)>& f, int npts = 4);
std::vector<double> load_vector(const Mesh1D& m, const std::function<double(double)>& f, int npts = 4);

} // namespace tsolve
