#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace tsolve {

// S(x) = sum_k w_k exp(-a_k x), approximating 1/x on [beta, inf).
struct ExpSum {
    std::vector<double> nodes;
    std::vector<double> weights;
    double beta = 1.0;
    int r_nominal = 0;
    bool clipped = false;
    bool polished = false;
    double measured_sup_error = std::numeric_limits<double>::quiet_NaN();
    // max(1/X, S(X)) at the right end X of the scan; bounds |S - 1/x| beyond it.
    double tail_bound = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return nodes.size(); }
    std::size_t active_terms() const;
};

double t_r(int r);                       // (1/8) exp(pi sqrt r)
double clip_threshold(int r);            // 1 / t_r
double best_bound(int r, double beta);   // 16/beta exp(-pi sqrt r)
double clip_degradation(int r);          // 8 r e exp(-pi sqrt r)

struct SupScan {
    double sup_error = 0;
    double argmax = 0;
    double tail_bound = 0;
};

// Log-spaced scan of |S(x) - 1/x| over [beta, beta*10^decades].
SupScan measure_sup_error(const ExpSum& s, std::size_t points = 100000, double decades = 8.0);

// max of x*S(x) over a log grid on [x_lo, x_hi].
double max_x_times_s(const ExpSum& s, double x_lo, double x_hi, std::size_t points);

ExpSum build_expsum(int r, bool polish = false);
ExpSum rescale(const ExpSum& s, double beta);
ExpSum clip(const ExpSum& s);
double eval(const ExpSum& s, double x);

} // namespace tsolve
