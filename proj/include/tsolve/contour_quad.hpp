#pragma once

#include <complex>
#include <vector>

namespace tsolve {

using cplx = std::complex<double>;

// Nodes z_q = Gamma(qh) on c + cosh(x + i pi/6), q = -N..N (index q + N).
struct ContourRule {
    double h = 0;
    int N = 0;
    double c_under = 1;
    double b = 0;
    double alpha = 0;
    std::vector<cplx> nodes;
    std::vector<cplx> prefactors;   // -(1/(2 pi i)) sinh(qh + i pi/6) exp(-alpha Gamma(qh))

    cplx node(int q) const { return nodes[std::size_t(q + N)]; }
    cplx prefactor(int q) const { return prefactors[std::size_t(q + N)]; }
};

cplx hyperbola_point(double x, double c_under);
int choose_N(double h, double alpha, double b);
double error_constant(double alpha, double b, double M, double c_under);
double choose_h(double eps, int d, double c6);
bool validate_strip(double b, double c_under, double lambda_min);
double default_c_under(double lambda_min);

ContourRule make_rule(double alpha, double h, double b, double c_under);

} // namespace tsolve
