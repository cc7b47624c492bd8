#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "isaccoop/common.hpp"
#include "isaccoop/scenario.hpp"

namespace isaccoop {

struct PathLossParams {
  double reference_distance = 1.0;  // meters
  double exponent_los = 2.0;
  double exponent_nlos = 3.5;
};

/// Log-distance path loss: PL0(f) at the reference distance plus
/// 10*alpha*log10(d/d0), alpha chosen by the LoS flag.
double path_loss_db(double frequency_hz, double distance_m, bool los,
                    const PathLossParams& params = {});

struct RicianParams {
  double k_factor_db = 5.0;  // LoS-to-scatter power ratio
};

/// Unit-power Rician sample: sqrt(K/(K+1))*e^{j*los_phase} + sqrt(1/(K+1))*g.
cdouble rician_fade(RngStream& rng, const RicianParams& params, double los_phase);

/// ULA response, element k = exp(-j*2*pi*k*spacing*sin(angle)*f/c).
Eigen::VectorXcd steering_vector(int antenna_count, double antenna_spacing_m, double angle_rad,
                                 double frequency_hz);

/// Per-link physical truth for one radar echo.
struct EchoChannel {
  cdouble alpha;             // two-way amplitude, sqrt(mW)
  double tau = 0.0;          // seconds, two-way delay
  double doppler = 0.0;      // Hz
  bool los = true;
  std::string tx_station;
  std::string rx_station;
};

struct EchoOptions {
  PathLossParams path_loss;
  /// Per-leg Rician scattering; disabled (pure LoS amplitude plus random
  /// phase) when absent, the default for monostatic high-band links.
  std::optional<RicianParams> rician;
};

/// Radar-equation echo link: illum_power_gain is the product of transmit
/// power (mW) and the tx/rx array power gains actually pointed at the target.
EchoChannel make_echo_channel(const Scenario& scenario, const BaseStation& tx,
                              const BaseStation& rx, const Target& target,
                              double illum_power_gain, RngStream& rng,
                              const EchoOptions& options = {});

double noise_power_dbm(double psd_dbm_hz, double bandwidth_hz);

struct CommChannel {
  Eigen::VectorXcd h;  // per-antenna amplitude, sqrt(mW) per sqrt(mW) transmitted
  bool los = true;
  double distance = 0.0;  // meters
};

struct CommOptions {
  PathLossParams path_loss;
  std::optional<RicianParams> rician;  // absent = pure LoS steering response
};

/// Downlink channel from one station's array to a single-antenna user.
CommChannel make_comm_channel(const Scenario& scenario, const BaseStation& bs,
                              const Eigen::Vector3d& user, RngStream& rng,
                              const CommOptions& options = {});

/// Angle of a point as seen from the station's ULA (array along world x,
/// broadside towards +y), measured from broadside.
double azimuth_from_broadside(const BaseStation& bs, const Eigen::Vector3d& point);

}  // namespace isaccoop
