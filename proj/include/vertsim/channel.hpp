#ifndef VERTSIM_CHANNEL_HPP
#define VERTSIM_CHANNEL_HPP

#include "vertsim/common.hpp"

namespace vertsim {

struct RadioConfig {
    double carrier_frequency_hz = 28e9;
    double tx_power_dbm = 30.0;
    double tx_antenna_gain_dbi = 24.5;
    double rx_antenna_gain_dbi = 24.5;
    double tx_height_m = 10.0;
    double rx_height_m = 1.5;
    double noise_figure_db = 7.0;
    double bandwidth_hz = 100e6;

    void validate() const; // throws ConfigError on invariant violation
};

// Close-in reference distance model: PL(d) = pl_d0 + 10*n*log10(d/d0) + X.
struct CiModelParams {
    double d0_m = 1.0;
    double pl_d0_db = 0.0; // free-space loss at d0; depends on carrier frequency
    double n = 2.0;        // path loss exponent
    double sigma_db = 0.0; // shadowing std-dev
};

// Floating-intercept model: PL(d) = alpha + 10*beta*log10(d) + X, d in metres.
struct AbModelParams {
    double alpha_db = 70.0;
    double beta = 2.9;
    double sigma_db = 0.0;
};

struct ExtraLossConfig {
    double rain_rate_mm_h = 0.0;
    double atmospheric_db_km = 0.0;
    double penetration_db = 0.0; // 0 for outdoor-to-outdoor
};

enum class LosState { Los, Nlos };

struct LinkState {
    LosState los = LosState::Los;
    double fading_gain_db = 0.0;
};

// Free-space path loss, 20*log10(4*pi*d*f/c). Strictly increasing in both
// arguments; throws std::domain_error for non-positive input.
double fspl_db(double frequency_hz, double distance_m);

double ci_path_loss_db(const CiModelParams& p, double distance_m, double shadowing_db);
double ab_path_loss_db(const AbModelParams& p, double distance_m, double shadowing_db);

// Specific rain attenuation in dB/km, linear in rain rate and interpolated
// over a small frequency table anchored at 7.0 dB/km for 25.4 mm/h at 28 GHz.
double rain_specific_attenuation_db_km(double frequency_hz, double rain_rate_mm_h);

// Rain + atmospheric losses scale with distance; penetration is a constant.
// extra_losses_db(cfg, f, 0) == cfg.penetration_db exactly.
double extra_losses_db(const ExtraLossConfig& cfg, double frequency_hz, double distance_m);

// Small-scale fading power gain in dB, unit mean in the linear domain.
// NLOS draws Rayleigh-derived (exponential) power; LOS draws Rician power
// with the given K-factor. rice_k_db = +inf degenerates to 0 dB.
double sample_fading_db(LosState state, double rice_k_db, Rng& rng);

// Large-scale shadowing draw, Normal(0, sigma^2) in dB.
double sample_shadowing_db(double sigma_db, Rng& rng);

// Bernoulli LOS draw with P(LOS) = exp(-d / d_los).
bool sample_los(double distance_m, double d_los_m, Rng& rng);

// Thermal noise floor: -174 dBm/Hz + 10*log10(bandwidth) + noise figure.
double noise_floor_dbm(const RadioConfig& radio);

double link_snr_db(const RadioConfig& radio, double total_path_loss_db, double fading_gain_db);

enum class PathLossModel { Ci, Ab };

// Per-cell channel configuration. LOS and NLOS carry separate large-scale
// parameters; the LOS probability decays exponentially with distance.
struct ChannelModelConfig {
    PathLossModel model = PathLossModel::Ci;
    CiModelParams ci_los{1.0, 0.0, 2.1, 3.0};
    CiModelParams ci_nlos{1.0, 0.0, 3.4, 6.0};
    AbModelParams ab_los{60.0, 2.1, 3.0};
    AbModelParams ab_nlos{70.0, 2.9, 6.0};
    ExtraLossConfig extra;
    double d_los_m = 50.0;
    double rice_k_db = 9.0;

    double shadowing_sigma_db(LosState s) const;
    // Large-scale loss without the extra-loss terms. Distances below the
    // model reference are clamped to it.
    double path_loss_db(LosState s, double distance_m, double shadowing_db) const;

    void validate() const;
};

} // namespace vertsim

#endif
