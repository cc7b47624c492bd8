#include "isaccoop/channel.hpp"

#include <cmath>

namespace isaccoop {

double path_loss_db(double frequency_hz, double distance_m, bool los,
                    const PathLossParams& params) {
  const double d0 = params.reference_distance;
  if (distance_m < d0) {
    throw DistanceBelowReference("distance " + std::to_string(distance_m) +
                                 " m below reference " + std::to_string(d0) + " m");
  }
  const double pl0 = 20.0 * std::log10(4.0 * kPi * d0 * frequency_hz / kSpeedOfLight);
  const double alpha = los ? params.exponent_los : params.exponent_nlos;
  return pl0 + 10.0 * alpha * std::log10(distance_m / d0);
}

cdouble rician_fade(RngStream& rng, const RicianParams& params, double los_phase) {
  const double k = db_to_linear(params.k_factor_db);
  const cdouble los = std::sqrt(k / (k + 1.0)) * std::polar(1.0, los_phase);
  return los + std::sqrt(1.0 / (k + 1.0)) * rng.cnormal();
}

Eigen::VectorXcd steering_vector(int antenna_count, double antenna_spacing_m, double angle_rad,
                                 double frequency_hz) {
  if (antenna_count < 1) throw InvalidConfig("antenna_count", "must be >= 1");
  Eigen::VectorXcd a(antenna_count);
  const double phase_step =
      -2.0 * kPi * antenna_spacing_m * std::sin(angle_rad) * frequency_hz / kSpeedOfLight;
  for (int k = 0; k < antenna_count; ++k) {
    a(k) = std::polar(1.0, phase_step * k);
  }
  return a;
}

double noise_power_dbm(double psd_dbm_hz, double bandwidth_hz) {
  if (bandwidth_hz <= 0.0) throw NonPositiveBandwidth();
  return psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

double azimuth_from_broadside(const BaseStation& bs, const Eigen::Vector3d& point) {
  const Eigen::Vector3d d = point - bs.position;
  return std::atan2(d.x(), d.y());
}

namespace {

/// One-way leg power gain (linear) including NLoS excess loss.
double leg_gain(double frequency_hz, double distance_m, bool los, const PathLossParams& pl) {
  return db_to_linear(-path_loss_db(frequency_hz, distance_m, los, pl));
}

}  // namespace

EchoChannel make_echo_channel(const Scenario& scenario, const BaseStation& tx,
                              const BaseStation& rx, const Target& target,
                              double illum_power_gain, RngStream& rng,
                              const EchoOptions& options) {
  if (target.rcs <= 0.0) throw InvalidConfig("target.rcs", "must be positive");
  const Eigen::Vector3d p = target.position;
  const double d_tx = (p - tx.position).norm();
  const double d_rx = (p - rx.position).norm();
  if (d_tx == 0.0 || d_rx == 0.0) throw TargetCoincidesWithStation();

  const bool los_tx = is_los(scenario, tx.position, p);
  const bool los_rx = is_los(scenario, rx.position, p);

  EchoChannel ch;
  ch.tx_station = tx.id;
  ch.rx_station = rx.id;
  ch.los = los_tx && los_rx;
  ch.tau = (d_tx + d_rx) / kSpeedOfLight;

  // Doppler: sum of radial rates towards tx and rx, scaled by the carrier.
  const Eigen::Vector3d u_tx = (tx.position - p) / d_tx;
  const Eigen::Vector3d u_rx = (rx.position - p) / d_rx;
  const double radial = target.velocity.dot(u_tx) + target.velocity.dot(u_rx);
  ch.doppler = radial * tx.carrier_frequency / kSpeedOfLight;

  // Radar equation split per leg: free-space legs recover
  // Pt*Gt*Gr*lambda^2*sigma/((4pi)^3*d_tx^2*d_rx^2); blocked legs pick up the
  // NLoS exponent instead.
  const double lambda = tx.wavelength();
  const double aperture = 4.0 * kPi * target.rcs / (lambda * lambda);
  double gain = illum_power_gain * aperture *
                leg_gain(tx.carrier_frequency, d_tx, los_tx, options.path_loss) *
                leg_gain(tx.carrier_frequency, d_rx, los_rx, options.path_loss);

  cdouble small_scale = std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
  if (options.rician) {
    small_scale *= rician_fade(rng, *options.rician, 0.0);
    small_scale *= rician_fade(rng, *options.rician, 0.0);
  }
  ch.alpha = std::sqrt(gain) * small_scale;
  return ch;
}

CommChannel make_comm_channel(const Scenario& scenario, const BaseStation& bs,
                              const Eigen::Vector3d& user, RngStream& rng,
                              const CommOptions& options) {
  CommChannel ch;
  ch.distance = (user - bs.position).norm();
  if (ch.distance == 0.0) throw TargetCoincidesWithStation();
  ch.los = is_los(scenario, bs.position, user);

  const double amp =
      std::sqrt(db_to_linear(-path_loss_db(bs.carrier_frequency, ch.distance, ch.los,
                                           options.path_loss)));
  const double angle = azimuth_from_broadside(bs, user);
  const Eigen::VectorXcd a = steering_vector(bs.antenna_count, bs.spacing(), angle,
                                             bs.carrier_frequency);

  ch.h = Eigen::VectorXcd(bs.antenna_count);
  if (options.rician) {
    const double k = db_to_linear(options.rician->k_factor_db);
    const double w_los = std::sqrt(k / (k + 1.0));
    const double w_sct = std::sqrt(1.0 / (k + 1.0));
    for (int i = 0; i < bs.antenna_count; ++i) {
      ch.h(i) = amp * (w_los * a(i) + w_sct * rng.cnormal());
    }
  } else {
    ch.h = amp * a;
  }
  // Common random carrier phase.
  ch.h *= std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
  return ch;
}

}  // namespace isaccoop
