#include "vertsim/channel.hpp"

#include "vertsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vertsim {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s

// dB/km at a reference rain rate of 25.4 mm/h (one inch per hour).
// Anchored at 7.0 dB/km for 28 GHz; neighbouring bands scaled from the
// usual k*R^alpha curves. Outside the table the nearest entry applies.
constexpr std::array<std::pair<double, double>, 4> kRainTable = {{
    {28e9, 7.0},
    {38e9, 10.0},
    {60e9, 15.0},
    {73e9, 18.0},
}};
constexpr double kRainReferenceRate = 25.4; // mm/h

} // namespace

void RadioConfig::validate() const {
    if (!(carrier_frequency_hz > 0.0)) throw ConfigError("radio: carrier_frequency_hz must be > 0");
    if (!(bandwidth_hz > 0.0)) throw ConfigError("radio: bandwidth_hz must be > 0");
    if (tx_height_m < 0.0 || rx_height_m < 0.0) throw ConfigError("radio: heights must be >= 0");
}

double fspl_db(double frequency_hz, double distance_m) {
    if (!(frequency_hz > 0.0) || !(distance_m > 0.0))
        throw std::domain_error("fspl: frequency and distance must be > 0");
    return 20.0 * std::log10(4.0 * M_PI * distance_m * frequency_hz / kSpeedOfLight);
}

double ci_path_loss_db(const CiModelParams& p, double distance_m, double shadowing_db) {
    if (!(distance_m > 0.0)) throw std::domain_error("ci_path_loss: distance must be > 0");
    return p.pl_d0_db + 10.0 * p.n * std::log10(distance_m / p.d0_m) + shadowing_db;
}

double ab_path_loss_db(const AbModelParams& p, double distance_m, double shadowing_db) {
    if (!(distance_m > 0.0)) throw std::domain_error("ab_path_loss: distance must be > 0");
    return p.alpha_db + 10.0 * p.beta * std::log10(distance_m) + shadowing_db;
}

double rain_specific_attenuation_db_km(double frequency_hz, double rain_rate_mm_h) {
    if (rain_rate_mm_h <= 0.0) return 0.0;
    double coeff;
    if (frequency_hz <= kRainTable.front().first) {
        coeff = kRainTable.front().second;
    } else if (frequency_hz >= kRainTable.back().first) {
        coeff = kRainTable.back().second;
    } else {
        coeff = kRainTable.back().second;
        for (std::size_t i = 0; i + 1 < kRainTable.size(); ++i) {
            if (frequency_hz <= kRainTable[i + 1].first) {
                double t = (frequency_hz - kRainTable[i].first) /
                           (kRainTable[i + 1].first - kRainTable[i].first);
                coeff = kRainTable[i].second +
                        t * (kRainTable[i + 1].second - kRainTable[i].second);
                break;
            }
        }
    }
    return coeff * (rain_rate_mm_h / kRainReferenceRate);
}

double extra_losses_db(const ExtraLossConfig& cfg, double frequency_hz, double distance_m) {
    if (distance_m < 0.0) throw std::domain_error("extra_losses: distance must be >= 0");
    double km = distance_m / 1000.0;
    return rain_specific_attenuation_db_km(frequency_hz, cfg.rain_rate_mm_h) * km +
           cfg.atmospheric_db_km * km + cfg.penetration_db;
}

double sample_fading_db(LosState state, double rice_k_db, Rng& rng) {
    if (state == LosState::Nlos) {
        // Rayleigh amplitude => exponential power with unit mean.
        double g = -std::log(uniform_open01(rng));
        return 10.0 * std::log10(g);
    }
    if (std::isinf(rice_k_db) && rice_k_db > 0.0) return 0.0;
    double k = std::pow(10.0, rice_k_db / 10.0);
    // Rician power normalized to unit mean: E[X^2 + Y^2] = nu^2 + 2*sigma^2 = 1.
    double nu = std::sqrt(k / (k + 1.0));
    double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    std::normal_distribution<double> n01(0.0, 1.0);
    double x = nu + sigma * n01(rng);
    double y = sigma * n01(rng);
    double g = x * x + y * y;
    return 10.0 * std::log10(g);
}

double sample_shadowing_db(double sigma_db, Rng& rng) {
    if (sigma_db < 0.0) throw std::domain_error("shadowing sigma must be >= 0");
    if (sigma_db == 0.0) return 0.0;
    std::normal_distribution<double> n(0.0, sigma_db);
    return n(rng);
}

bool sample_los(double distance_m, double d_los_m, Rng& rng) {
    if (!(d_los_m > 0.0)) return false;
    double p = std::exp(-distance_m / d_los_m);
    return uniform_open01(rng) < p;
}

double noise_floor_dbm(const RadioConfig& radio) {
    return -174.0 + 10.0 * std::log10(radio.bandwidth_hz) + radio.noise_figure_db;
}

double link_snr_db(const RadioConfig& radio, double total_path_loss_db, double fading_gain_db) {
    return radio.tx_power_dbm + radio.tx_antenna_gain_dbi + radio.rx_antenna_gain_dbi -
           total_path_loss_db + fading_gain_db - noise_floor_dbm(radio);
}

double ChannelModelConfig::shadowing_sigma_db(LosState s) const {
    if (model == PathLossModel::Ci)
        return s == LosState::Los ? ci_los.sigma_db : ci_nlos.sigma_db;
    return s == LosState::Los ? ab_los.sigma_db : ab_nlos.sigma_db;
}

double ChannelModelConfig::path_loss_db(LosState s, double distance_m, double shadowing_db) const {
    if (model == PathLossModel::Ci) {
        const CiModelParams& p = s == LosState::Los ? ci_los : ci_nlos;
        return ci_path_loss_db(p, std::max(distance_m, p.d0_m), shadowing_db);
    }
    const AbModelParams& p = s == LosState::Los ? ab_los : ab_nlos;
    return ab_path_loss_db(p, std::max(distance_m, 1.0), shadowing_db);
}

void ChannelModelConfig::validate() const {
    auto check_ci = [](const CiModelParams& p, const char* tag) {
        if (!(p.d0_m > 0.0)) throw ConfigError(std::string("channel.") + tag + ": d0_m must be > 0");
        if (!(p.n > 0.0)) throw ConfigError(std::string("channel.") + tag + ": n must be > 0");
        if (p.sigma_db < 0.0) throw ConfigError(std::string("channel.") + tag + ": sigma_db must be >= 0");
    };
    auto check_ab = [](const AbModelParams& p, const char* tag) {
        if (p.sigma_db < 0.0) throw ConfigError(std::string("channel.") + tag + ": sigma_db must be >= 0");
    };
    check_ci(ci_los, "ci_los");
    check_ci(ci_nlos, "ci_nlos");
    check_ab(ab_los, "ab_los");
    check_ab(ab_nlos, "ab_nlos");
    if (extra.rain_rate_mm_h < 0.0 || extra.atmospheric_db_km < 0.0 || extra.penetration_db < 0.0)
        throw ConfigError("channel.extra: loss terms must be >= 0");
    if (!(d_los_m > 0.0)) throw ConfigError("channel: d_los_m must be > 0");
}

} // namespace vertsim
