#include "isaccoop/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isaccoop/dsp.hpp"

namespace isaccoop {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

FrontendResult frontend_fuse(const std::vector<EchoFrame>& frames, const RefineParams& refine) {
  if (frames.empty()) throw ConfigMismatch("frontend_fuse needs at least one frame");
  const OfdmConfig& cfg = frames.front().config;
  for (const auto& f : frames) {
    if (!(f.config == cfg)) throw ConfigMismatch("frames must share the OFDM config");
    if (f.truth.empty()) throw ConfigMismatch("frontend alignment needs ground-truth channels");
  }

  const double tau_ref = frames.front().truth.front().tau;
  const double phi_ref = std::arg(frames.front().truth.front().alpha);

  EchoFrame fused;
  fused.config = cfg;
  fused.rx_station = frames.front().rx_station;
  fused.x_ref = Eigen::MatrixXcd::Ones(cfg.n_subcarriers, cfg.n_symbols);
  fused.y = Eigen::MatrixXcd::Zero(cfg.n_subcarriers, cfg.n_symbols);
  fused.noise_variance = 0.0;

  FrontendResult result;
  double amp_sum = 0.0;
  for (const auto& f : frames) {
    const EchoChannel& ch = f.truth.front();
    const double dtau = ch.tau - tau_ref;
    const double dphi = std::arg(ch.alpha) - phi_ref;
    const cdouble derotate = std::polar(1.0, -dphi);
    const cdouble step = std::polar(1.0, 2.0 * kPi * cfg.subcarrier_spacing * dtau);
    // y * conj(x) strips the transmitted symbols so grids from different
    // transmitters can be summed coherently.
    for (int m = 0; m < cfg.n_symbols; ++m) {
      cdouble ramp = derotate;
      for (int n = 0; n < cfg.n_subcarriers; ++n) {
        fused.y(n, m) += f.y(n, m) * std::conj(f.x_ref(n, m)) * ramp;
        ramp *= step;
      }
    }
    fused.noise_variance += f.noise_variance;
    amp_sum += std::abs(ch.alpha);
    result.input_snr_db.push_back(linear_to_db(estimate_snr_linear(f)));
  }

  EchoChannel combined = frames.front().truth.front();
  combined.alpha = std::polar(amp_sum, phi_ref);
  combined.doppler = 0.0;
  fused.truth = {combined};

  result.fused_snr_db = linear_to_db(estimate_snr_linear(fused));
  const double best_input =
      *std::max_element(result.input_snr_db.begin(), result.input_snr_db.end());
  if (result.fused_snr_db < best_input - 0.5) throw DestructiveCombining();

  CoarseParams coarse_params;
  coarse_params.pad_factor = refine.pad_factor;
  const RangeEstimate coarse = coarse_range(fused, coarse_params);
  result.estimate = refine_range(fused, coarse, refine);
  return result;
}

PositionEstimate midend_fuse(const std::vector<RangeObservation>& observations,
                             std::optional<Eigen::Vector2d> init,
                             std::optional<PositionPrior> prior) {
  const size_t k = observations.size();
  if (k < 2) throw ConfigMismatch("midend_fuse needs at least two range observations");
  if (k == 2 && !prior && !init) {
    throw ConfigMismatch("two receivers need a prior or an explicit initialization");
  }
  for (const auto& o : observations) {
    if (o.variance <= 0.0) throw InvalidConfig("observation.variance", "must be positive");
  }

  Eigen::Vector2d p;
  if (init) {
    p = *init;
  } else if (prior) {
    p = prior->mean;
  } else {
    double wsum = 0.0;
    p.setZero();
    for (const auto& o : observations) {
      const double w = 1.0 / o.variance;
      p += w * o.rx_position;
      wsum += w;
    }
    p /= wsum;
  }

  const double prior_w = prior ? 1.0 / (prior->stddev * prior->stddev) : 0.0;

  auto cost_at = [&](const Eigen::Vector2d& q) {
    double c = 0.0;
    for (const auto& o : observations) {
      const double r = (q - o.rx_position).norm() - o.range;
      c += r * r / o.variance;
    }
    if (prior) c += prior_w * (q - prior->mean).squaredNorm();
    return c;
  };

  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  bool converged = false;
  double cost = cost_at(p);
  for (int iter = 0; iter < 50 && !converged; ++iter) {
    hessian.setZero();
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    for (const auto& o : observations) {
      Eigen::Vector2d d = p - o.rx_position;
      double dist = d.norm();
      if (dist < 1e-9) {
        d = Eigen::Vector2d(1e-9, 0.0);
        dist = 1e-9;
      }
      const Eigen::Vector2d u = d / dist;
      const double w = 1.0 / o.variance;
      hessian += w * u * u.transpose();
      gradient += w * (dist - o.range) * u;
    }
    if (prior) {
      hessian += prior_w * Eigen::Matrix2d::Identity();
      gradient += prior_w * (p - prior->mean);
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hessian);
    if (es.eigenvalues()(0) <= 1e-12 * es.eigenvalues()(1) || es.eigenvalues()(1) <= 0.0) {
      throw CollinearGeometry();
    }
    Eigen::Vector2d step = -hessian.ldlt().solve(gradient);

    // Backtracking keeps the plain Gauss-Newton step from overshooting on
    // inconsistent observations.
    double scale = 1.0;
    Eigen::Vector2d next = p + step;
    double next_cost = cost_at(next);
    for (int bt = 0; bt < 12 && next_cost > cost; ++bt) {
      scale *= 0.5;
      next = p + scale * step;
      next_cost = cost_at(next);
    }
    p = next;
    cost = next_cost;
    if ((scale * step).norm() < 1e-6) converged = true;
  }
  if (!converged) throw NoConvergence("multilateration did not converge in 50 iterations");

  PositionEstimate est;
  est.position = p;
  est.covariance = hessian.inverse();
  est.fusion_level = FusionLevel::mid;
  est.degenerate_geometry = k < 3;
  for (const auto& o : observations) est.contributing_nodes.push_back(o.station);
  return est;
}

PositionEstimate backend_fuse(const std::vector<PositionEstimate>& local_fixes) {
  if (local_fixes.empty()) throw ConfigMismatch("backend_fuse needs at least one local fix");

  std::vector<double> xs, ys;
  for (const auto& f : local_fixes) {
    xs.push_back(f.position.x());
    ys.push_back(f.position.y());
  }
  const Eigen::Vector2d med(median(xs), median(ys));

  std::vector<double> dist;
  for (const auto& f : local_fixes) dist.push_back((f.position - med).norm());
  const double med_d = median(dist);
  std::vector<double> dev;
  for (double d : dist) dev.push_back(std::abs(d - med_d));
  const double mad = median(dev);
  const double cutoff = med_d + 3.0 * mad + 1e-12;

  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  PositionEstimate out;
  out.fusion_level = FusionLevel::back;
  int kept = 0;
  for (size_t i = 0; i < local_fixes.size(); ++i) {
    if (dist[i] > cutoff) continue;
    const Eigen::Matrix2d w = local_fixes[i].covariance.inverse();
    info += w;
    acc += w * local_fixes[i].position;
    for (const auto& id : local_fixes[i].contributing_nodes) {
      out.contributing_nodes.push_back(id);
    }
    ++kept;
  }
  if (kept == 0) throw AllFixesRejected();

  out.covariance = info.inverse();
  out.position = out.covariance * acc;
  out.degenerate_geometry = kept < 3;
  return out;
}

PositionEstimate local_fix_from_range_aoa(const BaseStation& station,
                                          const RangeEstimate& range, double aoa_rad,
                                          double aoa_variance) {
  // Array along world x, broadside towards +y: the angle maps to the
  // direction (sin a, cos a).
  const Eigen::Vector2d u(std::sin(aoa_rad), std::cos(aoa_rad));
  const Eigen::Vector2d t(std::cos(aoa_rad), -std::sin(aoa_rad));

  PositionEstimate fix;
  fix.position = station.position.head<2>() + range.range * u;
  const double radial = std::max(range.variance, 1e-12);
  const double tangential = std::max(range.range * range.range * aoa_variance, 1e-12);
  fix.covariance = radial * u * u.transpose() + tangential * t * t.transpose();
  fix.fusion_level = FusionLevel::back;
  fix.contributing_nodes = {station.id};
  fix.degenerate_geometry = true;
  return fix;
}

size_t strongest_profile(const std::vector<DelayProfile>& profiles) {
  if (profiles.empty()) throw ConfigMismatch("no delay profiles");
  size_t best = 0;
  double best_peak = -1.0;
  for (size_t i = 0; i < profiles.size(); ++i) {
    const double peak = profiles[i].values.cwiseAbs().maxCoeff();
    if (peak > best_peak) {
      best_peak = peak;
      best = i;
    }
  }
  return best;
}

std::vector<double> calibration_phases(const std::vector<DelayProfile>& profiles,
                                       size_t reference_node) {
  if (reference_node >= profiles.size()) throw ConfigMismatch("reference node out of range");
  Eigen::Index ref_bin = 0;
  profiles[reference_node].values.cwiseAbs().maxCoeff(&ref_bin);
  std::vector<double> phases;
  phases.reserve(profiles.size());
  for (const auto& p : profiles) {
    phases.push_back(std::arg(p.values(ref_bin)));
  }
  return phases;
}

DelayProfile symbol_level_fuse(const std::vector<DelayProfile>& profiles,
                               const std::vector<double>& reference_phases) {
  if (profiles.empty()) throw ConfigMismatch("no delay profiles");
  if (profiles.size() != reference_phases.size()) {
    throw ConfigMismatch("one calibration phase per profile required");
  }
  const Eigen::Index size = profiles.front().values.size();
  const double step = profiles.front().delay_step;
  DelayProfile out;
  out.delay_step = step;
  out.values = Eigen::VectorXcd::Zero(size);
  for (size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].values.size() != size ||
        std::abs(profiles[i].delay_step - step) > 1e-18) {
      throw GridMismatch();
    }
    out.values += std::polar(1.0, -reference_phases[i]) * profiles[i].values;
  }
  return out;
}

double profile_peak_range(const DelayProfile& profile) {
  Eigen::Index bin = 0;
  profile.values.cwiseAbs().maxCoeff(&bin);
  return kSpeedOfLight * static_cast<double>(bin) * profile.delay_step / 2.0;
}

EchoFrame apply_clock_offset(const EchoFrame& frame, double offset_s) {
  EchoFrame out = frame;
  const cdouble step = std::polar(1.0, -2.0 * kPi * frame.config.subcarrier_spacing * offset_s);
  cdouble ramp(1.0, 0.0);
  for (int n = 0; n < out.y.rows(); ++n) {
    out.y.row(n) *= ramp;
    ramp *= step;
  }
  return out;
}

TdoaResult tdoa_calibrate(const EchoFrame& frame, double reference_path_delay_s,
                          const TdoaParams& params) {
  const OfdmConfig& cfg = frame.config;
  const Eigen::VectorXcd g = compress_symbols(frame);

  const size_t grid = next_pow2(static_cast<size_t>(cfg.n_subcarriers) *
                                static_cast<size_t>(params.pad_factor));
  const double bin_tau = 1.0 / (static_cast<double>(grid) * cfg.subcarrier_spacing);

  // Coarse scan of the window, then a fine lattice around the winner.
  std::vector<double> coarse;
  for (double tau = reference_path_delay_s - params.search_window_s;
       tau <= reference_path_delay_s + params.search_window_s; tau += bin_tau / 2.0) {
    if (tau >= 0.0) coarse.push_back(tau);
  }
  if (coarse.empty()) throw ReferencePathNotDetected();
  DelaySearchResult hit =
      delay_matched_filter(g, cfg.subcarrier_spacing, coarse, reference_path_delay_s);

  const double fine_step = bin_tau / std::pow(2.0, params.lattice_exponent);
  std::vector<double> fine;
  for (double tau = hit.tau - bin_tau / 2.0; tau <= hit.tau + bin_tau / 2.0; tau += fine_step) {
    if (tau >= 0.0) fine.push_back(tau);
  }
  hit = delay_matched_filter(g, cfg.subcarrier_spacing, fine, hit.tau);

  // Detection: correlator output against its noise-only level.
  const double noise_level = frame.noise_variance / static_cast<double>(cfg.n_symbols);
  if (hit.correlation_power < db_to_linear(params.detection_threshold_db) * noise_level) {
    throw ReferencePathNotDetected();
  }

  TdoaResult result;
  result.estimated_offset_s = hit.tau - reference_path_delay_s;
  result.frame = apply_clock_offset(frame, -result.estimated_offset_s);

  if (params.subtract_reference) {
    // After compensation the reference sits at the geometric delay; cancel
    // its least-squares reconstruction so later ranging sees the echo only.
    const Eigen::MatrixXcd& x = result.frame.x_ref;
    const cdouble step =
        std::polar(1.0, -2.0 * kPi * cfg.subcarrier_spacing * reference_path_delay_s);
    cdouble ramp = hit.amplitude;
    for (int n = 0; n < result.frame.y.rows(); ++n) {
      for (int m = 0; m < result.frame.y.cols(); ++m) {
        result.frame.y(n, m) -= ramp * x(n, m);
      }
      ramp *= step;
    }
  }
  return result;
}

}  // namespace isaccoop
