#include "tsolve/fem1d.hpp"

#include "tsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsolve {

double BandedSym::operator()(int i, int j) const
{
    if (i > j) std::swap(i, j);
    if (j - i > p) return 0.0;
    return a[std::size_t(i) * (p + 1) + (j - i)];
}

void BandedSym::add(int i, int j, double v)
{
    if (i > j) std::swap(i, j);
    a[std::size_t(i) * (p + 1) + (j - i)] += v;
}

template <class T>
static std::vector<T> band_mul(const BandedSym& A, const std::vector<T>& x)
{
    std::vector<T> y(A.n, T(0));
    for (int i = 0; i < A.n; ++i) {
        const double* row = &A.a[std::size_t(i) * (A.p + 1)];
        y[i] += row[0] * x[i];
        for (int k = 1; k <= A.p && i + k < A.n; ++k) {
            y[i] += row[k] * x[i + k];
            y[i + k] += row[k] * x[i];
        }
    }
    return y;
}

std::vector<double> BandedSym::multiply(const std::vector<double>& x) const { return band_mul(*this, x); }
std::vector<std::complex<double>> BandedSym::multiply(const std::vector<std::complex<double>>& x) const
{
    return band_mul(*this, x);
}

double BandedSym::dot(const std::vector<double>& x, const std::vector<double>& y) const
{
    auto Ay = multiply(y);
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i] * Ay[i];
    return s;
}

double BandedSym::max_abs() const
{
    double m = 0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

namespace {

const double kStiffP2[3][3] = {{7, -8, 1}, {-8, 16, -8}, {1, -8, 7}};
const double kMassP2[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};

template <class F>
void for_each_element(const Mesh1D& m, F&& f)
{
    for (int e = 0; e < m.elements; ++e) {
        int dof[3];
        for (int a = 0; a <= m.order; ++a) {
            int i = m.order * e + a - 1;
            dof[a] = (i >= 0 && i < m.n()) ? i : -1;
        }
        f(e, dof);
    }
}

} // namespace

BandedSym assemble_stiffness(const Mesh1D& m, double kappa)
{
    if (m.order != 1 && m.order != 2) throw DomainError("element order must be 1 or 2");
    BandedSym K(m.n(), m.order);
    const double H = m.hsize();
    for_each_element(m, [&](int, const int* dof) {
        for (int a = 0; a <= m.order; ++a)
            for (int b = a; b <= m.order; ++b) {
                if (dof[a] < 0 || dof[b] < 0) continue;
                double v = m.order == 1 ? (a == b ? 1.0 : -1.0) * kappa / H
                                        : kappa * kStiffP2[a][b] / (3.0 * H);
                if (a == b) K.add(dof[a], dof[a], v);
                else K.add(dof[a], dof[b], v);
            }
    });
    return K;
}

BandedSym assemble_mass(const Mesh1D& m)
{
    if (m.order != 1 && m.order != 2) throw DomainError("element order must be 1 or 2");
    BandedSym M(m.n(), m.order);
    const double H = m.hsize();
    for_each_element(m, [&](int, const int* dof) {
        for (int a = 0; a <= m.order; ++a)
            for (int b = a; b <= m.order; ++b) {
                if (dof[a] < 0 || dof[b] < 0) continue;
                double v = m.order == 1 ? (a == b ? 2.0 : 1.0) * H / 6.0 : kMassP2[a][b] * H / 30.0;
                M.add(dof[a], dof[b], v);
            }
    });
    return M;
}

GaussRule gauss_legendre(int npts)
{
    GaussRule g;
    for (int i = 0; i < npts; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= npts; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (npts == 1) p0 = 1;
            dp = npts * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.x.push_back(0.5 * (1 - x));
        g.w.push_back(1.0 / ((1 - x * x) * dp * dp));
    }
    return g;
}

void shape(int order, double xi, double* phi, double* dphi)
{
    if (order == 1) {
        phi[0] = 1 - xi;
        phi[1] = xi;
        dphi[0] = -1;
        dphi[1] = 1;
    } else {
        phi[0] = 2 * (xi - 0.5) * (xi - 1);
        phi[1] = -4 * xi * (xi - 1);
        phi[2] = 2 * xi * (xi - 0.5);
        dphi[0] = 4 * xi - 3;
        dphi[1] = -8 * xi + 4;
        dphi[2] = 4 * xi - 1;
    }
}

double fe_eval(const GridFunction& g, double x)
{
    const Mesh1D& m = g.mesh;
    if (x <= 0 || x >= m.L) return 0.0;
    double H = m.hsize();
    int e = std::min(m.elements - 1, int(x / H));
    double xi = (x - e * H) / H;
    double phi[3], dphi[3];
    shape(m.order, xi, phi, dphi);
    double v = 0;
    for (int a = 0; a <= m.order; ++a) {
        int i = m.order * e + a - 1;
        if (i >= 0 && i < m.n()) v += phi[a] * g.values[i];
    }
    return v;
}

GridFunction interpolate(const Mesh1D& m, const std::function<double(double)>& f)
{
    GridFunction g{m, std::vector<double>(m.n())};
    for (int i = 0; i < m.n(); ++i) g.values[i] = f(m.node(i));
    return g;
}

GridFunction transfer(const GridFunction& g, const Mesh1D& target)
{
    if (g.mesh == target) return g;
    return interpolate(target, [&](double x) { return fe_eval(g, x); });
}

std::vector<double> load_vector(const Mesh1D& m, const std::function<double(double)>& f, int npts)
{
    std::vector<double> b(m.n(), 0.0);
    GaussRule q = gauss_legendre(npts);
    const double H = m.hsize();
    for_each_element(m, [&](int e, const int* dof) {
        for (std::size_t k = 0; k < q.x.size(); ++k) {
            double phi[3], dphi[3];
            shape(m.order, q.x[k], phi, dphi);
            double fx = f((e + q.x[k]) * H) * q.w[k] * H;
            for (int a = 0; a <= m.order; ++a)
                if (dof[a] >= 0) b[dof[a]] += phi[a] * fx;
        }
    });
    return b;
}

double load_inner(const GridFunction& g, const std::function<double(double)>& f, int npts)
{
    auto b = load_vector(g.mesh, f, npts);
    double s = 0;
    for (int i = 0; i < g.mesh.n(); ++i) s += b[i] * g.values[i];
    return s;
}

} // namespace tsolve
