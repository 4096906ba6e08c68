#include "tsolve/growth.hpp"

#include "tsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsolve {

GrowthClass GrowthClass::polynomial(double alpha)
{
    if (!(alpha > 0)) throw DomainError("polynomial growth needs alpha > 0");
    GrowthClass g;
    g.kind = Kind::polynomial;
    g.a = alpha;
    return g;
}

GrowthClass GrowthClass::stretched_exponential(double c, double beta)
{
    if (!(c > 0) || !(beta > 0)) throw DomainError("stretched exponential growth needs c, beta > 0");
    GrowthClass g;
    g.kind = Kind::stretched_exponential;
    g.a = c;
    g.b = beta;
    return g;
}

GrowthClass GrowthClass::tabulated(std::vector<double> values)
{
    if (values.size() < 2) throw DomainError("tabulated growth needs at least two values");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) throw DomainError("tabulated growth must be strictly increasing");
    GrowthClass g;
    g.kind = Kind::tabulated;
    g.table = std::move(values);
    return g;
}

// Polynomial growth takes gamma(r) = r^alpha for r >= 1 and gamma = 1 below.
double GrowthClass::gamma(double r) const
{
    switch (kind) {
    case Kind::polynomial:
        return r < 1 ? 1.0 : std::pow(r, a);
    case Kind::stretched_exponential:
        return std::exp(a * std::pow(std::max(r, 0.0), b));
    case Kind::tabulated: {
        if (r < 0) return table.front();
        double top = double(table.size() - 1);
        if (r > top) throw DomainError("tabulated growth evaluated beyond its table");
        std::size_t i = std::min<std::size_t>(std::size_t(r), table.size() - 2);
        double f = r - double(i);
        return table[i] + f * (table[i + 1] - table[i]);
    }
    }
    return 1.0;
}

double GrowthClass::inverse(double x) const
{
    switch (kind) {
    case Kind::polynomial:
        return x <= 1 ? 1.0 : std::pow(x, 1.0 / a);
    case Kind::stretched_exponential:
        return x <= 1 ? 0.0 : std::pow(std::log(x) / a, 1.0 / b);
    case Kind::tabulated: {
        if (x <= table.front()) return 0.0;
        if (x > table.back()) throw DomainError("tabulated growth: value exceeds table, gamma assumed unbounded");
        auto it = std::lower_bound(table.begin(), table.end(), x);
        std::size_t i = std::size_t(it - table.begin());
        return double(i - 1) + (x - table[i - 1]) / (table[i] - table[i - 1]);
    }
    }
    return 0.0;
}

std::string GrowthClass::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::polynomial: os << "r^" << a; break;
    case Kind::stretched_exponential: os << "exp(" << a << " r^" << b << ")"; break;
    case Kind::tabulated: os << "tabulated[" << table.size() << "]"; break;
    }
    return os.str();
}

GrowthCheck check_growth(const GrowthClass& g, double rmax)
{
    GrowthCheck c;
    if (g.kind == GrowthClass::Kind::tabulated) rmax = std::min(rmax, double(g.table.size() - 1));
    c.increasing = true;
    for (int r = 1; r + 1 <= int(rmax); ++r)
        if (!(g.gamma(r + 1) > g.gamma(r))) c.increasing = false;
    double y0 = g.inverse(1.0);
    c.cbar = 0;
    for (double y = y0; y + 1 <= rmax; y += 0.01) {
        double q = g.gamma(y + 1) / g.gamma(y);
        c.cbar = std::max(c.cbar, std::isfinite(q) ? q : INFINITY);
    }
    c.mu = INFINITY;
    for (double x = 2; x <= rmax; x += 0.5) c.mu = std::min(c.mu, std::log(g.gamma(x)) / std::log(x));
    if (!std::isfinite(c.mu)) c.mu = 0;
    c.ok = c.increasing && std::isfinite(c.cbar) && c.cbar > 0 && c.mu > 0;
    return c;
}

} // namespace tsolve
