#pragma once

#include <functional>
#include <span>

namespace burstlab {

double mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance; requires at least two samples.
double sample_variance(std::span<const double> x);
double sample_std(std::span<const double> x);
/// Pearson correlation of two equally long samples.
double pearson(std::span<const double> x, std::span<const double> y);

struct KsResult {
    double statistic;  // sup |F1 - F2|
    double p_value;    // asymptotic Kolmogorov distribution
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test. Inputs need not be sorted.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample test against a continuous reference CDF.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

}  // namespace burstlab
