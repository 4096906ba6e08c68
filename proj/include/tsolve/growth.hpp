#pragma once

#include <string>
#include <vector>

namespace tsolve {

struct GrowthClass {
    enum class Kind { polynomial, stretched_exponential, tabulated };
    Kind kind = Kind::polynomial;
    double a = 1.0;   // polynomial exponent, or c of exp(c r^b)
    double b = 1.0;   // stretched-exponential exponent
    std::vector<double> table;   // gamma(0), gamma(1), ...

    static GrowthClass polynomial(double alpha);
    static GrowthClass stretched_exponential(double c, double beta);
    static GrowthClass tabulated(std::vector<double> values);

    double gamma(double r) const;
    double inverse(double x) const;    // continuous inverse, table interpolated
    std::string describe() const;
};

struct GrowthCheck {
    bool increasing = false;
    double cbar = 0;      // sup gamma(y+1)/gamma(y)
    double mu = 0;        // x^mu <= gamma(x) on the scan range
    bool ok = false;
};

GrowthCheck check_growth(const GrowthClass& g, double rmax = 1000);

} // namespace tsolve
