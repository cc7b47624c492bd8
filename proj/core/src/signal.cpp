#include "isaccoop/signal.hpp"

#include <cmath>

namespace isaccoop {

void OfdmConfig::validate() const {
  if (n_subcarriers < 1) throw InvalidConfig("ofdm.n_subcarriers", "must be >= 1");
  if (n_symbols < 1) throw InvalidConfig("ofdm.n_symbols", "must be >= 1");
  if (subcarrier_spacing <= 0.0) throw InvalidConfig("ofdm.subcarrier_spacing", "must be positive");
  if (symbol_duration > 0.0 && symbol_duration < 1.0 / subcarrier_spacing) {
    throw InvalidConfig("ofdm.symbol_duration", "must be >= 1/subcarrier_spacing");
  }
  if (carrier_frequency <= 0.0) throw InvalidConfig("ofdm.carrier_frequency", "must be positive");
}

Eigen::MatrixXcd make_tx_grid(const OfdmConfig& config, RngStream& rng) {
  config.validate();
  static const cdouble kQpsk[4] = {
      {M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2},
      {-M_SQRT1_2, M_SQRT1_2}, {-M_SQRT1_2, -M_SQRT1_2}};
  Eigen::MatrixXcd x(config.n_subcarriers, config.n_symbols);
  for (int m = 0; m < config.n_symbols; ++m) {
    for (int n = 0; n < config.n_subcarriers; ++n) {
      x(n, m) = kQpsk[rng.next_u64() & 3];
    }
  }
  return x;
}

EchoFrame synthesize_echo(const Eigen::MatrixXcd& x, const std::vector<EchoChannel>& channels,
                          const OfdmConfig& config, double noise_psd_dbm_hz, RngStream& rng,
                          double clock_offset_s) {
  config.validate();
  if (x.rows() != config.n_subcarriers || x.cols() != config.n_symbols) {
    throw ConfigMismatch("tx grid dimensions do not match the OFDM config");
  }

  EchoFrame frame;
  frame.config = config;
  frame.x_ref = x;
  frame.truth = channels;
  if (!channels.empty()) frame.rx_station = channels.front().rx_station;

  const int n_sc = config.n_subcarriers;
  const int n_sym = config.n_symbols;
  const double df = config.subcarrier_spacing;
  const double t_sym = config.symbol_time();
  frame.noise_variance = dbm_to_mw(noise_psd_dbm_hz) * df;

  frame.y = Eigen::MatrixXcd::Zero(n_sc, n_sym);
  for (const auto& ch : channels) {
    const double tau = ch.tau + clock_offset_s;
    const cdouble step_n = std::polar(1.0, -2.0 * kPi * df * tau);
    const cdouble step_m = std::polar(1.0, 2.0 * kPi * t_sym * ch.doppler);
    cdouble phase_m = ch.alpha;
    for (int m = 0; m < n_sym; ++m) {
      cdouble phase = phase_m;
      for (int n = 0; n < n_sc; ++n) {
        frame.y(n, m) += phase * x(n, m);
        phase *= step_n;
      }
      phase_m *= step_m;
    }
  }

  const double sigma = std::sqrt(frame.noise_variance);
  for (int m = 0; m < n_sym; ++m) {
    for (int n = 0; n < n_sc; ++n) {
      frame.y(n, m) += sigma * rng.cnormal();
    }
  }
  return frame;
}

double estimate_snr_linear(const EchoFrame& frame) {
  if (frame.y.size() == 0) throw EmptyFrame();
  const double mean_power = frame.y.squaredNorm() / static_cast<double>(frame.y.size());
  const double floor = 1e-12 * frame.noise_variance;
  const double signal = std::max(mean_power - frame.noise_variance, floor);
  return signal / frame.noise_variance;
}

double frame_snr_db(const EchoFrame& frame) {
  if (frame.noise_variance <= 0.0) throw ConfigMismatch("frame noise variance unknown");
  if (!frame.truth.empty()) {
    double sig = 0.0;
    for (const auto& ch : frame.truth) sig += std::norm(ch.alpha);
    return linear_to_db(sig / frame.noise_variance);
  }
  return linear_to_db(estimate_snr_linear(frame));
}

}  // namespace isaccoop
