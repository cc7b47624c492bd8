#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "isaccoop/common.hpp"
#include "isaccoop/signal.hpp"

namespace isaccoop {

enum class RangeMethod { coarse, refined };

struct RangeEstimate {
  double range = 0.0;     // meters, one-way (monostatic convention c*tau/2)
  double variance = 0.0;  // m^2, CRLB at the measured SNR
  RangeMethod method = RangeMethod::coarse;
  std::vector<double> profile;  // delay-domain magnitude (coarse only)
  std::string rx_station;

  double snr_linear = 0.0;        // measured per-element SNR
  double peak_to_floor_db = 0.0;  // delay-domain detection statistic
};

/// Symbol-averaged subcarrier vector g[n] = mean_m y[n,m] * conj(x[n,m]),
/// optionally after Doppler compensation.
Eigen::VectorXcd compress_symbols(const EchoFrame& frame, double doppler_hz = 0.0);

struct CoarseParams {
  int pad_factor = 8;
  bool doppler_search = false;
};

/// Stage-1 acquisition: zero-padded IDFT across subcarriers, peak bin.
RangeEstimate coarse_range(const EchoFrame& frame, const CoarseParams& params = {});

struct RefineParams {
  int half_candidates = 32;  // K: candidates are coarse +/- k*delta, k = 0..K
  int lattice_exponent = 5;  // L: delta = padded bin / 2^L
  int pad_factor = 8;        // must match the coarse stage
};

/// Stage-2/3 super-resolution: per candidate distance, least-squares echo
/// reconstruction and cancellation; the candidate with the smallest residual
/// energy wins (equivalently, maximum matched-filter correlation).
/// Ties break towards the candidate closest to the coarse estimate.
RangeEstimate refine_range(const EchoFrame& frame, const RangeEstimate& coarse,
                           const RefineParams& params = {});

/// Doppler peak from a zero-padded DFT across the symbol axis after
/// delay-compensated subcarrier compression.  Returns Hz.
double doppler_estimate(const EchoFrame& frame, int pad_factor = 8,
                        std::optional<double> tau_s = {});

inline double doppler_to_velocity(double doppler_hz, double carrier_hz) {
  return kSpeedOfLight * doppler_hz / (2.0 * carrier_hz);
}

struct ArrayConfig {
  int antenna_count = 0;
  double antenna_spacing = 0.0;  // meters
  double carrier_frequency = 0.0;
};

/// Spatial matched filter over a 0.1 degree grid with 3-point parabolic
/// peak interpolation.  One frame per antenna element.
double aoa_estimate(const std::vector<EchoFrame>& per_antenna, const ArrayConfig& array);

struct CrlbReport {
  double crlb_tau = 0.0;    // s^2
  double crlb_range = 0.0;  // m^2
  Eigen::Matrix4d fim;      // over (tau, f_D, Re alpha, Im alpha)
  double snr_linear = 0.0;
};

/// Fisher information of the echo model under circular Gaussian noise.
CrlbReport crlb_range(const EchoChannel& channel, const OfdmConfig& config,
                      double noise_variance);

/// kappa such that crlb_range == kappa / (per-element SNR) for this waveform;
/// depends only on (N, M, subcarrier spacing).
double crlb_range_snr_product(const OfdmConfig& config);

/// Complex delay-domain profile of a frame on the padded IDFT grid.
struct DelayProfile {
  Eigen::VectorXcd values;
  double delay_step = 0.0;  // seconds per bin
};

DelayProfile delay_profile(const EchoFrame& frame, int pad_factor = 8);

/// Matched-filter search over explicit delay candidates; used by the
/// refinement stage and by reference-path calibration.
struct DelaySearchResult {
  double tau = 0.0;
  cdouble amplitude;              // least-squares amplitude at the winner
  double residual_energy = 0.0;   // ||g - a*s||^2 at the winner
  double correlation_power = 0.0; // |<s, g>|^2 / N
};

DelaySearchResult delay_matched_filter(const Eigen::VectorXcd& g, double subcarrier_spacing,
                                       const std::vector<double>& candidates_s,
                                       double tie_center_s);

}  // namespace isaccoop
