#ifndef VERTSIM_DISTFIT_HPP
#define VERTSIM_DISTFIT_HPP

#include "vertsim/common.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vertsim {

enum class Kpi { Delay, DropProbability, Throughput };
enum class DistFamily { LogNormal, Gamma, Exponential, Bernoulli };

std::string kpi_name(Kpi k);
Kpi kpi_from_name(const std::string& s);
std::string family_name(DistFamily f);
DistFamily family_from_name(const std::string& s);

// Parameter vector layout per family:
//   LogNormal:   {mu, sigma}      (of the log samples; sigma >= 0)
//   Gamma:       {shape, scale}   (both > 0)
//   Exponential: {rate}           (> 0)
//   Bernoulli:   {p}              (in [0, 1])
struct KpiDistribution {
    Kpi kpi = Kpi::Delay;
    DistFamily family = DistFamily::LogNormal;
    std::vector<double> params;
    double ks_statistic = 0.0;
    std::size_t sample_count = 0;
};

std::size_t param_count(DistFamily f);
// Throws DataError if params violate the family constraints above.
void validate_params(DistFamily f, std::span<const double> params);

constexpr std::size_t kMinFitSamples = 30;

// Maximum-likelihood fit plus a one-sample KS diagnostic against the fitted
// CDF. Requires at least kMinFitSamples samples inside the family support.
KpiDistribution fit(std::span<const double> samples, DistFamily family, Kpi kpi);

// Fits every candidate and keeps the one with the smallest KS statistic;
// ties break towards the earlier candidate. Candidates whose fit throws
// are skipped; an empty candidate list is a configuration error.
KpiDistribution select_family(std::span<const double> samples,
                              std::span<const DistFamily> candidates, Kpi kpi);

double cdf(const KpiDistribution& dist, double x);

// F^-1(u) for u in (0,1). Exponential and Bernoulli are closed-form;
// LogNormal and Gamma bisect the CDF to 1e-10 absolute tolerance.
double inverse_cdf(const KpiDistribution& dist, double u);

// Inverse-transform draw: uniform u in (0,1) evaluated through inverse_cdf.
double sample_kpi(const KpiDistribution& dist, Rng& rng);

// Special functions backing the fits; exposed for reuse and testing.
double regularized_gamma_p(double a, double x); // P(a, x)
double digamma(double x);
double trigamma(double x);
double normal_cdf(double z);

} // namespace vertsim

#endif
