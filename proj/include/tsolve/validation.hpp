#pragma once

#include "tsolve/growth.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/scheme_exp.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tsolve {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double time_limit = 0;
    std::vector<std::pair<std::string, double>> metrics;
};

// Rank-one data with factors x(1-x) on unit intervals.
ExactProblem poly_bump_problem(int d, int modes = 64);
TensorSum nodal_data_on_scheme_mesh(const ExactProblem& ex, double eps, const SchemeParameters& p);
double data_norm_surrogate(const ExactProblem& ex, const SchemeParameters& p);

struct BenchRow {
    int d = 0;
    double eps = 0;
    SolveReport report;
    ErrorNorms errors;
    double surrogate = 0;
};

BenchRow run_bench_row(int d, double eps, const SchemeParameters& p, const GrowthClass& gamma);

CriterionResult check_tail_domination();
CriterionResult check_expsum_decay();
CriterionResult check_inverse_error(std::uint64_t seed);
CriterionResult check_contour_convergence(std::uint64_t seed);
CriterionResult check_truncation(std::uint64_t seed);
CriterionResult check_sandwich(std::uint64_t seed);
CriterionResult check_scheme_end_to_end();
CriterionResult check_tractability();
CriterionResult check_oracle_consistency(std::uint64_t seed);

// expsum | spectral | contour | scheme | all
std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed);

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace tsolve
