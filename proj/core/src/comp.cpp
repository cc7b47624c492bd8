#include "isaccoop/comp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isaccoop/ranging.hpp"
#include "isaccoop/sdp.hpp"

namespace isaccoop {

double jt_spectral_efficiency(const std::vector<CommChannel>& channels,
                              const std::vector<Eigen::VectorXcd>& weights,
                              double noise_power_linear, bool coherent) {
  if (channels.size() != weights.size() || channels.empty()) {
    throw ConfigMismatch("one weight vector per channel required");
  }
  if (noise_power_linear <= 0.0) throw InvalidConfig("noise_power", "must be positive");

  double amp_sum = 0.0;
  double power_sum = 0.0;
  for (size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].h.size() != weights[i].size()) {
      throw ConfigMismatch("weight length does not match the channel antenna count");
    }
    // Pre-compensation rotates every term onto a common phase, so the
    // coherent sum is the sum of moduli.
    const double amp = std::abs(channels[i].h.dot(weights[i]));
    amp_sum += amp;
    power_sum += amp * amp;
  }
  const double received = coherent ? amp_sum * amp_sum : power_sum;
  return std::log2(1.0 + received / noise_power_linear);
}

double PowerMinProblem::required_echo_snr() const {
  if (sense_steering.empty() || crlb_bound_m2 <= 0.0 ||
      !std::isfinite(crlb_bound_m2)) {
    return 0.0;
  }
  return kappa / crlb_bound_m2;
}

void PowerMinProblem::validate() const {
  if (comm_channels.empty()) throw InvalidConfig("comm_channels", "candidate list is empty");
  if (comm_noise_mw <= 0.0) throw InvalidConfig("comm_noise", "must be positive");
  if (crlb_bound_m2 <= 0.0 && !sense_steering.empty()) {
    throw InvalidConfig("crlb_bound", "must be positive");
  }
  if (!sense_steering.empty()) {
    if (sense_steering.size() != comm_channels.size() ||
        sense_gain.size() != comm_channels.size()) {
      throw ConfigMismatch("sensing model must cover every candidate station");
    }
    if (kappa <= 0.0) throw InvalidConfig("kappa", "must be positive");
  }
  if (!power_caps_mw.empty() && power_caps_mw.size() != comm_channels.size()) {
    throw ConfigMismatch("one power cap per station required");
  }
}

double total_power_mw(const std::vector<Eigen::VectorXcd>& weights) {
  double p = 0.0;
  for (const auto& w : weights) p += w.squaredNorm();
  return p;
}

double achieved_sinr_db(const PowerMinProblem& problem,
                        const std::vector<Eigen::VectorXcd>& weights) {
  double amp = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    amp += std::abs(problem.comm_channels[i].dot(weights[i]));
  }
  return linear_to_db(amp * amp / problem.comm_noise_mw);
}

namespace {

double echo_snr(const PowerMinProblem& problem, const std::vector<Eigen::VectorXcd>& weights) {
  double snr = 0.0;
  for (size_t i = 0; i < problem.sense_steering.size(); ++i) {
    snr += problem.sense_gain[i] * std::norm(problem.sense_steering[i].dot(weights[i]));
  }
  return snr;
}

bool caps_ok(const PowerMinProblem& problem, const std::vector<Eigen::VectorXcd>& weights) {
  if (problem.power_caps_mw.empty()) return true;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].squaredNorm() > problem.power_caps_mw[i] * (1.0 + 1e-9)) return false;
  }
  return true;
}

/// Scales the weights so both constraints hold with the smaller feasible
/// power (the tighter constraint binds exactly).
double feasibility_scale(const PowerMinProblem& problem,
                         const std::vector<Eigen::VectorXcd>& weights) {
  double amp = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    amp += std::abs(problem.comm_channels[i].dot(weights[i]));
  }
  const double t2 = db_to_linear(problem.sinr_target_db) * problem.comm_noise_mw;
  double beta2 = amp > 0.0 ? t2 / (amp * amp) : std::numeric_limits<double>::infinity();
  const double need_s = problem.required_echo_snr();
  if (need_s > 0.0) {
    const double s = echo_snr(problem, weights);
    const double bs = s > 0.0 ? need_s / s : std::numeric_limits<double>::infinity();
    beta2 = std::max(beta2, bs);
  }
  if (!std::isfinite(beta2)) throw Infeasible("zero response on a binding constraint");
  return std::sqrt(beta2);
}

BeamformingSolution finish_solution(const PowerMinProblem& problem,
                                    std::vector<Eigen::VectorXcd> weights,
                                    BeamformingMethod method, double lower_bound_mw) {
  const double beta = feasibility_scale(problem, weights);
  for (auto& w : weights) w *= beta;

  BeamformingSolution sol;
  sol.method = method;
  sol.weights = std::move(weights);
  sol.total_power_dbm = mw_to_dbm(total_power_mw(sol.weights));
  sol.achieved_sinr_db = achieved_sinr_db(problem, sol.weights);
  const double s = echo_snr(problem, sol.weights);
  sol.achieved_crlb_m2 =
      s > 0.0 ? problem.kappa / s : std::numeric_limits<double>::infinity();
  sol.feasible = caps_ok(problem, sol.weights);
  if (!sol.feasible) throw Infeasible("per-station power cap");
  sol.lower_bound_power_dbm = mw_to_dbm(std::max(lower_bound_mw, 1e-300));
  return sol;
}

}  // namespace

BeamformingSolution min_power_crlb_approx(const PowerMinProblem& problem) {
  problem.validate();
  const size_t k = problem.comm_channels.size();
  const double gamma = db_to_linear(problem.sinr_target_db);
  const double t = std::sqrt(gamma * problem.comm_noise_mw);
  const double need_s = problem.required_echo_snr();

  double h_norm2 = 0.0;
  for (const auto& h : problem.comm_channels) h_norm2 += h.squaredNorm();
  if (h_norm2 <= 0.0) throw Infeasible("all user channels are zero");

  // phi(nu) = sum_i h_i^H (I - nu g_i a_i a_i^H)^-1 h_i via Sherman-Morrison.
  auto phi = [&](double nu) {
    double sum = 0.0;
    for (size_t i = 0; i < k; ++i) {
      sum += problem.comm_channels[i].squaredNorm();
      if (need_s > 0.0 && problem.sense_gain[i] > 0.0) {
        const double g = problem.sense_gain[i];
        const double a2 = problem.sense_steering[i].squaredNorm();
        const double cross = std::norm(problem.sense_steering[i].dot(problem.comm_channels[i]));
        sum += nu * g * cross / (1.0 - nu * g * a2);
      }
    }
    return sum;
  };
  auto dual_value = [&](double nu) { return t * t / phi(nu) + nu * need_s; };

  double nu_star = 0.0;
  if (need_s > 0.0) {
    double nu_max = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < k; ++i) {
      if (problem.sense_gain[i] > 0.0) {
        nu_max = std::min(nu_max,
                          1.0 / (problem.sense_gain[i] * problem.sense_steering[i].squaredNorm()));
      }
    }
    if (!std::isfinite(nu_max)) throw Infeasible("sensing constraint with zero gains");
    // Golden-section maximization of the concave dual on [0, nu_max).
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = nu_max * (1.0 - 1e-12);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = dual_value(x1);
    double f2 = dual_value(x2);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = dual_value(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = dual_value(x1);
      }
    }
    nu_star = 0.5 * (lo + hi);
    if (dual_value(0.0) >= dual_value(nu_star)) nu_star = 0.0;
  }

  // Primal recovery from the dual point.
  const double phi_star = phi(nu_star);
  std::vector<Eigen::VectorXcd> w_dual(k);
  for (size_t i = 0; i < k; ++i) {
    Eigen::VectorXcd w = problem.comm_channels[i];
    if (nu_star > 0.0 && problem.sense_gain[i] > 0.0) {
      const double g = problem.sense_gain[i];
      const auto& a = problem.sense_steering[i];
      const cdouble ah = a.dot(problem.comm_channels[i]);
      w += (nu_star * g * ah / (1.0 - nu_star * g * a.squaredNorm())) * a;
    }
    w_dual[i] = (t / phi_star) * w;
  }

  // Alternative construction: the communication-only optimum plus an
  // orthogonal sensing beam on the best-geared station.  Covers the corner
  // where the user and target directions nearly decouple.
  std::vector<Eigen::VectorXcd> w_best = w_dual;
  double best_power = std::numeric_limits<double>::infinity();
  {
    const double beta = feasibility_scale(problem, w_dual);
    best_power = beta * beta * total_power_mw(w_dual);
  }
  if (need_s > 0.0) {
    std::vector<Eigen::VectorXcd> w_comm(k);
    for (size_t i = 0; i < k; ++i) w_comm[i] = (t / h_norm2) * problem.comm_channels[i];
    const double s_comm = echo_snr(problem, w_comm);
    if (s_comm < need_s) {
      for (size_t j = 0; j < k; ++j) {
        if (problem.sense_gain[j] <= 0.0) continue;
        const auto& a = problem.sense_steering[j];
        const auto& h = problem.comm_channels[j];
        Eigen::VectorXcd a_perp = a;
        if (h.squaredNorm() > 0.0) a_perp -= (h.dot(a) / h.squaredNorm()) * h;
        const double perp_norm = a_perp.norm();
        if (perp_norm < 1e-12) continue;
        const double g = problem.sense_gain[j];
        const double others = s_comm - g * std::norm(a.dot(w_comm[j]));
        const double need_j = need_s - others;
        if (need_j <= 0.0) continue;
        const double have = std::abs(a.dot(w_comm[j]));
        const double perp_gain = std::abs(a.dot(a_perp)) / perp_norm;
        if (perp_gain < 1e-12) continue;
        const double beta_v = std::max(0.0, (std::sqrt(need_j / g) - have) / perp_gain);
        std::vector<Eigen::VectorXcd> w_cand = w_comm;
        const cdouble aw = a.dot(w_cand[j]);
        const double theta = std::abs(aw) > 0.0 ? std::arg(aw) : 0.0;
        const cdouble rot =
            std::polar(1.0, theta - std::arg(a.dot(a_perp)));
        w_cand[j] += beta_v * rot * a_perp / perp_norm;
        const double beta = feasibility_scale(problem, w_cand);
        const double p = beta * beta * total_power_mw(w_cand);
        if (p < best_power) {
          best_power = p;
          w_best = std::move(w_cand);
        }
      }
    }
  }

  return finish_solution(problem, std::move(w_best), BeamformingMethod::crlb_approx,
                         dual_value(nu_star));
}

namespace {

struct StackedSdr {
  SdpProblem sdp;
  std::vector<int> offsets;
  int total = 0;
};

StackedSdr build_sdr(const PowerMinProblem& problem) {
  StackedSdr s;
  for (const auto& h : problem.comm_channels) {
    s.offsets.push_back(s.total);
    s.total += static_cast<int>(h.size());
  }
  const int n = s.total;
  Eigen::VectorXcd h_stack(n);
  for (size_t i = 0; i < problem.comm_channels.size(); ++i) {
    h_stack.segment(s.offsets[i], problem.comm_channels[i].size()) = problem.comm_channels[i];
  }

  s.sdp.objective = Eigen::MatrixXcd::Identity(n, n);
  s.sdp.lower_mats.push_back(h_stack * h_stack.adjoint());
  s.sdp.lower_bounds.push_back(db_to_linear(problem.sinr_target_db) * problem.comm_noise_mw);

  const double need_s = problem.required_echo_snr();
  if (need_s > 0.0) {
    Eigen::MatrixXcd a_blk = Eigen::MatrixXcd::Zero(n, n);
    for (size_t i = 0; i < problem.sense_steering.size(); ++i) {
      const auto& a = problem.sense_steering[i];
      a_blk.block(s.offsets[i], s.offsets[i], a.size(), a.size()) =
          problem.sense_gain[i] * (a * a.adjoint());
    }
    s.sdp.lower_mats.push_back(std::move(a_blk));
    s.sdp.lower_bounds.push_back(need_s);
  }

  for (size_t i = 0; i < problem.power_caps_mw.size(); ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    const int len = static_cast<int>(problem.comm_channels[i].size());
    e.block(s.offsets[i], s.offsets[i], len, len) = Eigen::MatrixXcd::Identity(len, len);
    s.sdp.upper_mats.push_back(std::move(e));
    s.sdp.upper_bounds.push_back(problem.power_caps_mw[i]);
  }
  return s;
}

}  // namespace

BeamformingSolution min_power_sdr(const PowerMinProblem& problem, const SdrOptions& options) {
  problem.validate();
  StackedSdr stacked = build_sdr(problem);
  if (stacked.total > options.max_total_antennas) {
    throw InvalidConfig("sdr.total_antennas",
                        "instance exceeds the SDR size limit of " +
                            std::to_string(options.max_total_antennas));
  }

  SdpOptions sdp_options;
  sdp_options.gap_tolerance = options.gap_tolerance;
  const SdpSolution relax = solve_sdp(stacked.sdp, sdp_options);

  // Rank-one recovery: principal eigenvector, then feasibility rescaling.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(relax.x);
  if (es.info() != Eigen::Success) throw SolverFailure("eigendecomposition failed");
  const int n = stacked.total;
  const double lam = es.eigenvalues()(n - 1);
  if (lam <= 0.0) throw SolverFailure("relaxation optimum has no positive eigenvalue");
  const Eigen::VectorXcd w_stack = std::sqrt(lam) * es.eigenvectors().col(n - 1);

  std::vector<Eigen::VectorXcd> weights(problem.comm_channels.size());
  for (size_t i = 0; i < weights.size(); ++i) {
    weights[i] = w_stack.segment(stacked.offsets[i], problem.comm_channels[i].size());
  }
  return finish_solution(problem, std::move(weights), BeamformingMethod::sdr,
                         relax.objective - relax.gap);
}

double sdr_rank_ratio(const PowerMinProblem& problem, const SdrOptions& options) {
  problem.validate();
  StackedSdr stacked = build_sdr(problem);
  SdpOptions sdp_options;
  sdp_options.gap_tolerance = options.gap_tolerance;
  const SdpSolution relax = solve_sdp(stacked.sdp, sdp_options);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(relax.x);
  const int n = stacked.total;
  if (n == 1) return 0.0;
  return es.eigenvalues()(n - 2) / es.eigenvalues()(n - 1);
}

Eigen::VectorXcd hybrid_factorize(const Eigen::VectorXcd& w, int rf_chains, int max_iterations,
                                  double tolerance) {
  const int n = static_cast<int>(w.size());
  if (rf_chains < 1 || rf_chains >= n) {
    throw InvalidConfig("rf_chain_count", "must be in [1, antenna_count)");
  }

  // Unit-modulus RF matrix seeded from the beam's phase profile.
  Eigen::MatrixXcd f_rf(n, rf_chains);
  for (int k = 0; k < n; ++k) {
    const double base = std::arg(w(k));
    for (int c = 0; c < rf_chains; ++c) {
      f_rf(k, c) = std::polar(1.0, base - 2.0 * kPi * k * c / n);
    }
  }

  Eigen::VectorXcd f_bb(rf_chains);
  double prev_residual = std::numeric_limits<double>::infinity();
  const double w_norm = std::max(w.norm(), 1e-300);
  for (int it = 0; it < max_iterations; ++it) {
    f_bb = f_rf.colPivHouseholderQr().solve(w);
    // Cyclic coordinate descent over the unit-modulus entries.
    for (int k = 0; k < n; ++k) {
      for (int c = 0; c < rf_chains; ++c) {
        if (std::abs(f_bb(c)) < 1e-300) continue;
        cdouble rho = w(k);
        for (int c2 = 0; c2 < rf_chains; ++c2) {
          if (c2 != c) rho -= f_rf(k, c2) * f_bb(c2);
        }
        f_rf(k, c) = std::polar(1.0, std::arg(rho) - std::arg(f_bb(c)));
      }
    }
    const double residual = (w - f_rf * f_bb).norm() / w_norm;
    if (residual < tolerance || std::abs(prev_residual - residual) < tolerance) {
      return f_rf * f_bb;
    }
    prev_residual = residual;
  }
  throw NoConvergence("hybrid factorization did not stabilize");
}

BeamformingSolution hybrid_project(const BeamformingSolution& digital,
                                   const PowerMinProblem& problem, int rf_chain_count) {
  std::vector<Eigen::VectorXcd> weights;
  weights.reserve(digital.weights.size());
  for (const auto& w : digital.weights) {
    weights.push_back(hybrid_factorize(w, rf_chain_count));
  }
  BeamformingSolution sol = finish_solution(problem, std::move(weights), digital.method,
                                            dbm_to_mw(digital.lower_bound_power_dbm));
  sol.power_penalty_db = sol.total_power_dbm - digital.total_power_dbm;
  return sol;
}

namespace {

PowerMinProblem subproblem(const PowerMinProblem& full, const std::vector<int>& subset) {
  PowerMinProblem sub;
  sub.sinr_target_db = full.sinr_target_db;
  sub.comm_noise_mw = full.comm_noise_mw;
  sub.crlb_bound_m2 = full.crlb_bound_m2;
  sub.kappa = full.kappa;
  for (int i : subset) {
    sub.comm_channels.push_back(full.comm_channels[static_cast<size_t>(i)]);
    if (!full.sense_steering.empty()) {
      sub.sense_steering.push_back(full.sense_steering[static_cast<size_t>(i)]);
      sub.sense_gain.push_back(full.sense_gain[static_cast<size_t>(i)]);
    }
    if (!full.power_caps_mw.empty()) {
      sub.power_caps_mw.push_back(full.power_caps_mw[static_cast<size_t>(i)]);
    }
  }
  return sub;
}

BeamformingSolution solve_by(const PowerMinProblem& p, BeamformingMethod method) {
  return method == BeamformingMethod::sdr ? min_power_sdr(p) : min_power_crlb_approx(p);
}

}  // namespace

NodeSelection select_nodes(const PowerMinProblem& problem, BeamformingMethod method,
                           int exhaustive_limit) {
  problem.validate();
  const int k = problem.station_count();

  NodeSelection best;
  double best_power = std::numeric_limits<double>::infinity();

  auto consider = [&](const std::vector<int>& subset) {
    try {
      BeamformingSolution sol = solve_by(subproblem(problem, subset), method);
      const double p = dbm_to_mw(sol.total_power_dbm);
      if (sol.feasible && p < best_power) {
        best_power = p;
        best.selected = subset;
        best.solution = std::move(sol);
      }
      return true;
    } catch (const InfeasibleError&) {
      return false;
    }
  };

  if (k <= exhaustive_limit) {
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> subset;
      for (int i = 0; i < k; ++i) {
        if (mask & (1u << i)) subset.push_back(i);
      }
      consider(subset);
    }
  } else {
    std::vector<int> selected;
    std::vector<bool> used(static_cast<size_t>(k), false);
    while (static_cast<int>(selected.size()) < k) {
      int pick = -1;
      double pick_power = best_power;
      for (int c = 0; c < k; ++c) {
        if (used[static_cast<size_t>(c)]) continue;
        std::vector<int> trial = selected;
        trial.push_back(c);
        std::sort(trial.begin(), trial.end());
        try {
          BeamformingSolution sol = solve_by(subproblem(problem, trial), method);
          const double p = dbm_to_mw(sol.total_power_dbm);
          if (sol.feasible && p < pick_power) {
            pick_power = p;
            pick = c;
          }
        } catch (const InfeasibleError&) {
        }
      }
      if (pick < 0 && !best.selected.empty()) break;  // no improving addition
      if (pick < 0) {
        // Nothing feasible yet: grow with the least-power candidate anyway.
        for (int c = 0; c < k; ++c) {
          if (!used[static_cast<size_t>(c)]) {
            pick = c;
            break;
          }
        }
      }
      used[static_cast<size_t>(pick)] = true;
      selected.push_back(pick);
      std::sort(selected.begin(), selected.end());
      consider(selected);
    }
  }

  if (best.selected.empty()) throw NoFeasibleSubset();
  return best;
}

PowerMinProblem build_power_problem(const Scenario& scenario, const PowerMinSpec& spec,
                                    const PowerProblemOptions& options, RngStream& rng) {
  if (spec.candidate_stations.empty()) {
    throw InvalidConfig("candidate_stations", "must be non-empty");
  }
  if (spec.crlb_bound_m2 <= 0.0) throw InvalidConfig("crlb_bound", "must be positive");

  PowerMinProblem problem;
  problem.sinr_target_db = spec.sinr_target_db;
  problem.crlb_bound_m2 = spec.crlb_bound_m2;
  problem.kappa = crlb_range_snr_product(options.ofdm);
  problem.comm_noise_mw =
      dbm_to_mw(noise_power_dbm(options.noise_psd_dbm_hz, options.comm_bandwidth_hz));

  const double radar_noise_mw =
      dbm_to_mw(options.noise_psd_dbm_hz) * options.ofdm.subcarrier_spacing;
  const double rcs = scenario.targets.empty() ? 1.0 : scenario.targets.front().rcs;

  CommOptions comm_options;
  comm_options.path_loss = options.path_loss;
  comm_options.rician = options.comm_rician;

  for (const auto& id : spec.candidate_stations) {
    const BaseStation& bs = scenario.station(id);
    RngStream sub = rng.substream(splitmix64(std::hash<std::string>{}(id)));
    problem.comm_channels.push_back(
        make_comm_channel(scenario, bs, spec.comm_user, sub, comm_options).h);

    const double angle = azimuth_from_broadside(bs, spec.sense_target);
    problem.sense_steering.push_back(
        steering_vector(bs.antenna_count, bs.spacing(), angle, bs.carrier_frequency));

    const double dist = (spec.sense_target - bs.position).norm();
    if (dist <= 0.0) throw TargetCoincidesWithStation();
    const bool los = is_los(scenario, bs.position, spec.sense_target);
    const double lambda = bs.wavelength();
    const double leg = db_to_linear(
        -path_loss_db(bs.carrier_frequency, dist, los, options.path_loss));
    const double aperture = 4.0 * kPi * rcs / (lambda * lambda);
    // Monostatic echo: two path legs, coherent receive array gain.
    const double echo_gain = aperture * leg * leg * bs.antenna_count;
    problem.sense_gain.push_back(echo_gain / radar_noise_mw);
  }
  return problem;
}

}  // namespace isaccoop
