#include "vertsim/distfit.hpp"

#include "vertsim/errors.hpp"
#include "vertsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vertsim {

std::string kpi_name(Kpi k) {
    switch (k) {
        case Kpi::Delay: return "delay";
        case Kpi::DropProbability: return "drop";
        case Kpi::Throughput: return "throughput";
    }
    return "?";
}

Kpi kpi_from_name(const std::string& s) {
    if (s == "delay") return Kpi::Delay;
    if (s == "drop") return Kpi::DropProbability;
    if (s == "throughput") return Kpi::Throughput;
    throw DataError("unknown kpi name: " + s);
}

std::string family_name(DistFamily f) {
    switch (f) {
        case DistFamily::LogNormal: return "lognormal";
        case DistFamily::Gamma: return "gamma";
        case DistFamily::Exponential: return "exponential";
        case DistFamily::Bernoulli: return "bernoulli";
    }
    return "?";
}

DistFamily family_from_name(const std::string& s) {
    if (s == "lognormal") return DistFamily::LogNormal;
    if (s == "gamma") return DistFamily::Gamma;
    if (s == "exponential") return DistFamily::Exponential;
    if (s == "bernoulli") return DistFamily::Bernoulli;
    throw DataError("unknown distribution family: " + s);
}

std::size_t param_count(DistFamily f) {
    switch (f) {
        case DistFamily::LogNormal:
        case DistFamily::Gamma: return 2;
        case DistFamily::Exponential:
        case DistFamily::Bernoulli: return 1;
    }
    return 0;
}

void validate_params(DistFamily f, std::span<const double> p) {
    if (p.size() != param_count(f)) throw DataError("distribution parameter count mismatch");
    for (double v : p)
        if (!std::isfinite(v)) throw DataError("distribution parameter not finite");
    switch (f) {
        case DistFamily::LogNormal:
            if (p[1] < 0.0) throw DataError("lognormal sigma must be >= 0");
            break;
        case DistFamily::Gamma:
            if (!(p[0] > 0.0) || !(p[1] > 0.0)) throw DataError("gamma shape/scale must be > 0");
            break;
        case DistFamily::Exponential:
            if (!(p[0] > 0.0)) throw DataError("exponential rate must be > 0");
            break;
        case DistFamily::Bernoulli:
            if (p[0] < 0.0 || p[0] > 1.0) throw DataError("bernoulli p must be in [0,1]");
            break;
    }
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
    double r = 0.0;
    // Shift into the asymptotic region; at x >= 10 the truncated series is
    // accurate to ~1e-11.
    while (x < 10.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    // Asymptotic expansion.
    double inv = 1.0 / x, inv2 = inv * inv;
    return r + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double trigamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
    double r = 0.0;
    while (x < 10.0) {
        r += 1.0 / (x * x);
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    return r + inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0))));
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Series representation.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction for Q(a,x), modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

namespace {

void check_support(std::span<const double> samples, DistFamily f) {
    switch (f) {
        case DistFamily::LogNormal:
        case DistFamily::Gamma:
        case DistFamily::Exponential:
            for (double x : samples)
                if (!(x > 0.0)) throw std::domain_error("sample outside positive support");
            break;
        case DistFamily::Bernoulli:
            for (double x : samples)
                if (x != 0.0 && x != 1.0) throw std::domain_error("bernoulli sample not in {0,1}");
            break;
    }
}

std::vector<double> mle(std::span<const double> samples, DistFamily f) {
    const double n = static_cast<double>(samples.size());
    switch (f) {
        case DistFamily::LogNormal: {
            double mu = 0.0;
            for (double x : samples) mu += std::log(x);
            mu /= n;
            double s2 = 0.0;
            for (double x : samples) {
                double d = std::log(x) - mu;
                s2 += d * d;
            }
            return {mu, std::sqrt(s2 / n)};
        }
        case DistFamily::Gamma: {
            double m = mean(samples);
            double lm = 0.0;
            for (double x : samples) lm += std::log(x);
            lm /= n;
            double s = std::log(m) - lm; // >= 0 by Jensen; 0 only for constant data
            if (!(s > 1e-13)) throw DataError("gamma fit: degenerate (constant) samples");
            double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
            for (int i = 0; i < 100; ++i) {
                double g = std::log(k) - digamma(k) - s;
                double dg = 1.0 / k - trigamma(k);
                double step = g / dg;
                k -= step;
                if (!(k > 0.0)) { k = 1e-8; }
                if (std::fabs(step) < 1e-12 * std::max(1.0, k)) break;
            }
            return {k, m / k};
        }
        case DistFamily::Exponential:
            return {1.0 / mean(samples)};
        case DistFamily::Bernoulli:
            return {mean(samples)};
    }
    return {};
}

double cdf_impl(DistFamily f, std::span<const double> p, double x) {
    switch (f) {
        case DistFamily::LogNormal:
            if (x <= 0.0) return 0.0;
            if (p[1] == 0.0) return x < std::exp(p[0]) ? 0.0 : 1.0;
            return normal_cdf((std::log(x) - p[0]) / p[1]);
        case DistFamily::Gamma:
            if (x <= 0.0) return 0.0;
            return regularized_gamma_p(p[0], x / p[1]);
        case DistFamily::Exponential:
            if (x <= 0.0) return 0.0;
            return 1.0 - std::exp(-p[0] * x);
        case DistFamily::Bernoulli:
            if (x < 0.0) return 0.0;
            if (x < 1.0) return 1.0 - p[0];
            return 1.0;
    }
    return 0.0;
}

// Monotone bisection on the CDF. The bracket grows geometrically from a
// moment-based guess, then halves down to 1e-10 absolute (or double
// resolution, whichever is coarser).
double bisect_quantile(DistFamily f, std::span<const double> p, double u, double hi_guess) {
    double lo = 0.0;
    double hi = std::max(hi_guess, 1e-12);
    for (int i = 0; i < 400 && cdf_impl(f, p, hi) < u; ++i) hi *= 2.0;
    for (int i = 0; i < 500; ++i) {
        double width = hi - lo;
        if (width <= 1e-10 || width <= 1e-15 * hi) break;
        double mid = 0.5 * (lo + hi);
        if (cdf_impl(f, p, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

KpiDistribution fit(std::span<const double> samples, DistFamily family, Kpi kpi) {
    if (samples.size() < kMinFitSamples)
        throw InsufficientDataError("fit: need at least " + std::to_string(kMinFitSamples) +
                                    " samples, got " + std::to_string(samples.size()));
    check_support(samples, family);

    KpiDistribution d;
    d.kpi = kpi;
    d.family = family;
    d.params = mle(samples, family);
    d.sample_count = samples.size();
    validate_params(family, d.params);

    if (family == DistFamily::Bernoulli) {
        // Discrete support: the sup over x is attained at 0, where both CDFs
        // jump. Comparing F at the atoms directly avoids the left-limit
        // issue the generic formula has on step CDFs.
        double frac0 = 0.0;
        for (double x : samples)
            if (x == 0.0) frac0 += 1.0;
        frac0 /= static_cast<double>(samples.size());
        d.ks_statistic = std::fabs(frac0 - (1.0 - d.params[0]));
        return d;
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    d.ks_statistic =
        ks_one_sample_sorted(sorted, [&](double x) { return cdf_impl(family, d.params, x); });
    return d;
}

KpiDistribution select_family(std::span<const double> samples,
                              std::span<const DistFamily> candidates, Kpi kpi) {
    if (candidates.empty()) throw ConfigError("select_family: empty candidate list");
    bool have = false;
    KpiDistribution best;
    std::string first_error;
    for (DistFamily f : candidates) {
        try {
            KpiDistribution d = fit(samples, f, kpi);
            if (!have || d.ks_statistic < best.ks_statistic) {
                best = d;
                have = true;
            }
        } catch (const std::exception& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!have) throw DataError("select_family: every candidate failed; first: " + first_error);
    return best;
}

double cdf(const KpiDistribution& dist, double x) {
    return cdf_impl(dist.family, dist.params, x);
}

double inverse_cdf(const KpiDistribution& dist, double u) {
    if (!(u > 0.0) || !(u < 1.0)) throw std::domain_error("inverse_cdf: u must be in (0,1)");
    const auto& p = dist.params;
    switch (dist.family) {
        case DistFamily::Exponential:
            return -std::log1p(-u) / p[0];
        case DistFamily::Bernoulli:
            return u <= 1.0 - p[0] ? 0.0 : 1.0;
        case DistFamily::LogNormal: {
            if (p[1] == 0.0) return std::exp(p[0]);
            double med = std::exp(p[0]);
            return bisect_quantile(DistFamily::LogNormal, p, u, med * std::exp(4.0 * p[1]));
        }
        case DistFamily::Gamma: {
            double m = p[0] * p[1];
            double sd = std::sqrt(p[0]) * p[1];
            return bisect_quantile(DistFamily::Gamma, p, u, m + 8.0 * sd);
        }
    }
    throw std::domain_error("inverse_cdf: unknown family");
}

double sample_kpi(const KpiDistribution& dist, Rng& rng) {
    return inverse_cdf(dist, uniform_open01(rng));
}

} // namespace vertsim
