#pragma once
#include <cstddef>
#include <string>
#include <vector>

namespace blicket {

// 1-based ranks; ties share the average of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& xs);

struct SpearmanResult {
    double rho = 0.0;
    double t = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

// Spearman rank correlation over paired samples with a two-sided
// t-approximation p-value. Throws ConfigError on size mismatch, n < 3, or a
// constant input (correlation undefined).
SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Exact permutation two-sided p-value for Spearman's rho; n < 10 only.
double spearman_exact_p(const std::vector<double>& xs, const std::vector<double>& ys);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom, two-sided p. Requires at least two samples per side and nonzero
// pooled variance.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, otherwise "ns".
std::string significance_stars(double p);

double students_t_cdf(double x, double df);

double mean(const std::vector<double>& xs);

// Sample standard deviation (n-1 denominator); 0 for n < 2.
double sample_sd(const std::vector<double>& xs);

}
