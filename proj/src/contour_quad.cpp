#include "tsolve/contour_quad.hpp"

#include "tsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsolve {

using std::numbers::pi;

cplx hyperbola_point(double x, double c_under)
{
    return {c_under + std::cosh(x) * std::cos(pi / 6), std::sinh(x) * std::sin(pi / 6)};
}

int choose_N(double h, double alpha, double b)
{
    if (!(h > 0) || !(alpha > 0) || !(b > 0)) throw DomainError("choose_N: h, alpha, b must be positive");
    const double beta0 = 0.5 * alpha * std::cos(pi / 6);
    double t2 = std::floor(std::log(1.0 / beta0) / h) + 1;
    double t3 = std::floor(std::log(2 * pi * b / (beta0 * h)) / h) + 1;
    return int(std::max({0.0, t2, t3}));
}

double error_constant(double alpha, double b, double M, double c_under)
{
    if (!(b > 0 && b < pi / 6)) throw DomainError("error_constant: need 0 < b < pi/6");
    const double beta0 = 0.5 * alpha * std::cos(pi / 6);
    const double beta1 = 0.5 * alpha * std::cos(pi / 6 + b);
    const double beta2 = 0.5 * alpha * std::cos(pi / 6 - b);
    const double e2 = std::exp(2.0);
    return M / pi * std::exp(-c_under * alpha) *
           (1.0 / beta0 + e2 / (e2 - 1) * (std::exp(-beta1) / beta1 + std::exp(-beta2) / beta2));
}

double choose_h(double eps, int d, double c6)
{
    if (!(eps > 0) || d < 1 || !(c6 > 0)) throw DomainError("choose_h: need eps > 0, d >= 1, c6 > 0");
    if (!(double(d) / eps > 1)) throw DomainError("choose_h: requires d/eps > 1");
    return c6 / std::log(double(d) / eps);
}

bool validate_strip(double b, double c_under, double lambda_min)
{
    return b > 0 && b < pi / 6 && std::cos(pi / 6 - b) + c_under < lambda_min && c_under <= lambda_min / 2;
}

double default_c_under(double lambda_min) { return std::min(1.0, lambda_min / 2); }

ContourRule make_rule(double alpha, double h, double b, double c_under)
{
    ContourRule r;
    r.h = h;
    r.b = b;
    r.c_under = c_under;
    r.alpha = alpha;
    r.N = choose_N(h, alpha, b);
    const cplx i_pi6(0, pi / 6);
    const cplx coef = -1.0 / (2 * pi * cplx(0, 1));
    r.nodes.resize(2 * r.N + 1);
    r.prefactors.resize(2 * r.N + 1);
    for (int q = 0; q <= r.N; ++q) {
        cplx z = hyperbola_point(q * h, c_under);
        cplx p = coef * std::sinh(q * h + i_pi6) * std::exp(-alpha * z);
        r.nodes[r.N + q] = z;
        r.prefactors[r.N + q] = p;
        r.nodes[r.N - q] = std::conj(z);
        r.prefactors[r.N - q] = std::conj(p);
    }
    return r;
}

} // namespace tsolve
