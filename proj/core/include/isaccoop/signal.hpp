#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isaccoop/channel.hpp"
#include "isaccoop/common.hpp"

namespace isaccoop {

struct OfdmConfig {
  int n_subcarriers = 64;
  int n_symbols = 14;
  double subcarrier_spacing = 15.625e6;  // Hz
  double symbol_duration = 0.0;          // seconds; 0 resolves to 1/spacing + 7% CP
  double carrier_frequency = 0.34e12;    // Hz

  double bandwidth() const { return n_subcarriers * subcarrier_spacing; }
  double unambiguous_delay() const { return 1.0 / subcarrier_spacing; }
  double symbol_time() const {
    return symbol_duration > 0.0 ? symbol_duration : 1.07 / subcarrier_spacing;
  }
  void validate() const;

  bool operator==(const OfdmConfig&) const = default;
};

/// Observed subcarrier-by-symbol grid at one receiving node, along with the
/// known transmitted grid and (when synthesized locally) the ground-truth
/// channels behind it.
struct EchoFrame {
  Eigen::MatrixXcd y;      // N x M received
  Eigen::MatrixXcd x_ref;  // N x M transmitted, unit modulus
  OfdmConfig config;
  std::string rx_station;
  double noise_variance = 0.0;      // linear, per resource element
  std::vector<EchoChannel> truth;   // optional ground truth
};

/// Unit-modulus QPSK grid drawn from the stream.
Eigen::MatrixXcd make_tx_grid(const OfdmConfig& config, RngStream& rng);

/// Frequency-domain echo synthesis:
///   y[n,m] = sum_ch alpha * e^{-j2pi n df (tau+offset)} * e^{+j2pi m T fD} * x[n,m] + w[n,m]
/// with w i.i.d. circular Gaussian of variance psd_linear * df per element.
EchoFrame synthesize_echo(const Eigen::MatrixXcd& x, const std::vector<EchoChannel>& channels,
                          const OfdmConfig& config, double noise_psd_dbm_hz, RngStream& rng,
                          double clock_offset_s = 0.0);

/// Per-element SNR in dB; uses ground-truth amplitudes when the frame carries
/// them, otherwise a moment estimate from y.
double frame_snr_db(const EchoFrame& frame);

/// Moment estimate of the per-element SNR (linear) from y alone.
double estimate_snr_linear(const EchoFrame& frame);

}  // namespace isaccoop
