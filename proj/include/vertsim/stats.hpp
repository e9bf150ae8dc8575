#ifndef VERTSIM_STATS_HPP
#define VERTSIM_STATS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vertsim {

double mean(std::span<const double> xs);
// Sample standard deviation (n-1 denominator); 0 for fewer than 2 samples.
double stddev(std::span<const double> xs);

// Nearest-rank percentile, p in (0, 100]. Sorts a copy.
double percentile(std::span<const double> xs, double p);

// Sup-norm distance between the empirical CDF of `sorted` (ascending) and a
// model CDF.
double ks_one_sample_sorted(std::span<const double> sorted,
                            const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov distance. Sorts copies.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical KS distance at significance alpha for sample sizes n, m:
// c(alpha) * sqrt((n+m)/(n*m)).
double ks_critical(double alpha, std::size_t n, std::size_t m);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};

// Ordinary least squares y = a + b*x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace vertsim

#endif
