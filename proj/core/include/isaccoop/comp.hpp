#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "isaccoop/channel.hpp"
#include "isaccoop/common.hpp"
#include "isaccoop/scenario.hpp"
#include "isaccoop/signal.hpp"

namespace isaccoop {

/// Coherent joint transmission sums complex amplitudes after per-station
/// phase pre-compensation (all terms align); non-coherent sums powers.
/// Returns bits/s/Hz.
double jt_spectral_efficiency(const std::vector<CommChannel>& channels,
                              const std::vector<Eigen::VectorXcd>& weights,
                              double noise_power_linear, bool coherent);

struct PowerMinSpec {
  double sinr_target_db = 10.0;
  double crlb_bound_m2 = 0.03;
  std::vector<std::string> candidate_stations;
  Eigen::Vector3d comm_user = Eigen::Vector3d::Zero();
  Eigen::Vector3d sense_target = Eigen::Vector3d::Zero();
};

/// Self-contained solver input: per-station user channels plus the linearized
/// sensing side (CRLB bound mapped to a minimum cooperative echo SNR).
struct PowerMinProblem {
  double sinr_target_db = 10.0;
  double comm_noise_mw = 1.0;
  std::vector<Eigen::VectorXcd> comm_channels;  // h_i

  std::vector<Eigen::VectorXcd> sense_steering;  // a_i towards the target
  std::vector<double> sense_gain;  // g_i: echo SNR per unit illumination power
  double crlb_bound_m2 = 0.0;      // epsilon; <= 0 disables the constraint
  double kappa = 0.0;              // crlb_range * snr for the waveform

  std::vector<double> power_caps_mw;  // per station; empty = uncapped

  int station_count() const { return static_cast<int>(comm_channels.size()); }
  /// Required cooperative echo SNR, kappa/epsilon (0 when disabled).
  double required_echo_snr() const;
  void validate() const;
};

enum class BeamformingMethod { sdr, crlb_approx };

struct BeamformingSolution {
  std::vector<Eigen::VectorXcd> weights;
  double total_power_dbm = 0.0;
  bool feasible = false;
  BeamformingMethod method = BeamformingMethod::crlb_approx;
  double achieved_sinr_db = 0.0;
  double achieved_crlb_m2 = 0.0;
  /// Certified lower bound on the optimum (SDP relaxation / dual value).
  double lower_bound_power_dbm = 0.0;
  /// Extra transmit power versus the digital solution (hybrid only).
  double power_penalty_db = 0.0;
};

/// Achieved metrics recomputed from explicit weights.
double achieved_sinr_db(const PowerMinProblem& problem,
                        const std::vector<Eigen::VectorXcd>& weights);
double achieved_crlb_m2(const PowerMinProblem& problem,
                        const std::vector<Eigen::VectorXcd>& weights);
double total_power_mw(const std::vector<Eigen::VectorXcd>& weights);

/// CRLB-approximation method: the sensing constraint is the linear echo-SNR
/// form; solved by bisection over the one-dimensional concave dual.
BeamformingSolution min_power_crlb_approx(const PowerMinProblem& problem);

struct SdrOptions {
  int max_total_antennas = 16;
  double gap_tolerance = 1e-11;
};

/// Semidefinite relaxation over the stacked weight vector, solved with the
/// in-repo barrier method; rank-one recovery plus feasibility rescaling.
BeamformingSolution min_power_sdr(const PowerMinProblem& problem, const SdrOptions& = {});

/// Ratio of the second to first eigenvalue of the relaxation optimum
/// (tightness diagnostic).
double sdr_rank_ratio(const PowerMinProblem& problem, const SdrOptions& = {});

/// Unit-modulus RF / digital baseband factorization of one beam vector by
/// alternating minimization.  Returns F*f.
Eigen::VectorXcd hybrid_factorize(const Eigen::VectorXcd& w, int rf_chains,
                                  int max_iterations = 100, double tolerance = 1e-8);

/// Projects a digital solution onto the hybrid architecture and rescales to
/// restore constraint feasibility.
BeamformingSolution hybrid_project(const BeamformingSolution& digital,
                                   const PowerMinProblem& problem, int rf_chain_count);

struct NodeSelection {
  std::vector<int> selected;  // indices into the problem's station list
  BeamformingSolution solution;
};

/// Minimum-power subset selection: exhaustive up to `exhaustive_limit`
/// candidates, greedy forward selection beyond.
NodeSelection select_nodes(const PowerMinProblem& problem, BeamformingMethod method,
                           int exhaustive_limit = 6);

struct PowerProblemOptions {
  OfdmConfig ofdm;                      // defines kappa and the radar noise bandwidth
  double noise_psd_dbm_hz = -174.0;
  double comm_bandwidth_hz = 1e6;
  std::optional<RicianParams> comm_rician = RicianParams{5.0};
  PathLossParams path_loss;
};

/// Builds the solver input from scenario geometry: user channels, target
/// steering vectors, and radar-equation echo gains.
PowerMinProblem build_power_problem(const Scenario& scenario, const PowerMinSpec& spec,
                                    const PowerProblemOptions& options, RngStream& rng);

}  // namespace isaccoop
