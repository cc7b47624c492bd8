#include "isaccoop/ranging.hpp"

#include <algorithm>
#include <cmath>

#include "isaccoop/dsp.hpp"

namespace isaccoop {

Eigen::VectorXcd compress_symbols(const EchoFrame& frame, double doppler_hz) {
  if (frame.y.size() == 0) throw EmptyFrame();
  const int n_sc = frame.config.n_subcarriers;
  const int n_sym = frame.config.n_symbols;
  const double t_sym = frame.config.symbol_time();

  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n_sc);
  for (int m = 0; m < n_sym; ++m) {
    const cdouble rot = std::polar(1.0, -2.0 * kPi * t_sym * doppler_hz * m);
    for (int n = 0; n < n_sc; ++n) {
      g(n) += frame.y(n, m) * std::conj(frame.x_ref(n, m)) * rot;
    }
  }
  g /= static_cast<double>(n_sym);
  return g;
}

namespace {

/// Peak statistics of a magnitude-squared profile: floor excludes the
/// mainlobe around the winning bin.
struct PeakStats {
  size_t bin = 0;
  double peak_power = 0.0;
  double floor_power = 0.0;
};

PeakStats profile_peak(const std::vector<cdouble>& z, int pad_factor) {
  PeakStats stats;
  for (size_t i = 0; i < z.size(); ++i) {
    const double p = std::norm(z[i]);
    if (p > stats.peak_power) {
      stats.peak_power = p;
      stats.bin = i;
    }
  }
  const long guard = 2L * pad_factor;
  double sum = 0.0;
  long count = 0;
  const long n = static_cast<long>(z.size());
  for (long i = 0; i < n; ++i) {
    long d = std::abs(i - static_cast<long>(stats.bin));
    d = std::min(d, n - d);  // circular distance
    if (d > guard) {
      sum += std::norm(z[static_cast<size_t>(i)]);
      ++count;
    }
  }
  stats.floor_power = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return stats;
}

/// CRLB-based range variance at a measured per-element SNR.
double variance_from_snr(const OfdmConfig& config, double snr_linear) {
  const double floor = 1e-9;
  return crlb_range_snr_product(config) / std::max(snr_linear, floor);
}

}  // namespace

DelayProfile delay_profile(const EchoFrame& frame, int pad_factor) {
  const Eigen::VectorXcd g = compress_symbols(frame);
  DelayProfile p;
  p.values = Eigen::VectorXcd::Zero(0);
  std::vector<cdouble> z = padded_idft(g, pad_factor);
  p.values.resize(static_cast<Eigen::Index>(z.size()));
  for (size_t i = 0; i < z.size(); ++i) p.values(static_cast<Eigen::Index>(i)) = z[i];
  p.delay_step = 1.0 / (static_cast<double>(z.size()) * frame.config.subcarrier_spacing);
  return p;
}

RangeEstimate coarse_range(const EchoFrame& frame, const CoarseParams& params) {
  if (frame.y.size() == 0) throw EmptyFrame();
  const OfdmConfig& cfg = frame.config;

  double doppler = 0.0;
  if (params.doppler_search && cfg.n_symbols >= 2) {
    // First pass without compensation gives the delay used for the Doppler
    // search; the compensated average then sharpens the delay profile.
    Eigen::VectorXcd g0 = compress_symbols(frame);
    std::vector<cdouble> z0 = padded_idft(g0, params.pad_factor);
    const PeakStats s0 = profile_peak(z0, params.pad_factor);
    const double tau0 =
        static_cast<double>(s0.bin) / (static_cast<double>(z0.size()) * cfg.subcarrier_spacing);
    doppler = doppler_estimate(frame, params.pad_factor, tau0);
  }

  const Eigen::VectorXcd g = compress_symbols(frame, doppler);
  std::vector<cdouble> z = padded_idft(g, params.pad_factor);
  const PeakStats stats = profile_peak(z, params.pad_factor);

  RangeEstimate est;
  est.method = RangeMethod::coarse;
  est.rx_station = frame.rx_station;
  const double tau =
      static_cast<double>(stats.bin) / (static_cast<double>(z.size()) * cfg.subcarrier_spacing);
  est.range = kSpeedOfLight * tau / 2.0;
  est.peak_to_floor_db =
      stats.floor_power > 0.0 ? linear_to_db(stats.peak_power / stats.floor_power) : 0.0;
  // Measured per-element SNR: the frame-moment estimate works at high SNR,
  // the matched-filter peak statistic at low SNR; take the better of the two.
  const double elements = static_cast<double>(cfg.n_subcarriers) * cfg.n_symbols;
  const double peak_snr =
      std::max(db_to_linear(est.peak_to_floor_db) - 1.0, 0.0) / elements;
  est.snr_linear = std::max(estimate_snr_linear(frame), peak_snr);
  est.variance = variance_from_snr(cfg, est.snr_linear);
  est.profile.reserve(z.size());
  for (const auto& v : z) est.profile.push_back(std::abs(v));
  return est;
}

DelaySearchResult delay_matched_filter(const Eigen::VectorXcd& g, double subcarrier_spacing,
                                       const std::vector<double>& candidates_s,
                                       double tie_center_s) {
  if (candidates_s.empty()) throw CandidateSetEmpty();
  const int n = static_cast<int>(g.size());
  const double energy = g.squaredNorm();

  DelaySearchResult best;
  bool have_best = false;
  double best_residual = 0.0;
  double best_dist = 0.0;
  for (double tau : candidates_s) {
    // Least-squares amplitude of the unit-modulus template, then the energy
    // of the cancelled residual.  By Parseval this equals the IDFT-domain
    // residual energy up to a constant factor.
    const cdouble step = std::polar(1.0, 2.0 * kPi * subcarrier_spacing * tau);
    cdouble w(1.0, 0.0);
    cdouble corr(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      corr += g(k) * w;  // conj(e^{-j w tau}) = e^{+j w tau}
      w *= step;
    }
    const double corr_power = std::norm(corr) / static_cast<double>(n);
    const double residual = energy - corr_power;
    const double dist = std::abs(tau - tie_center_s);
    if (!have_best || residual < best_residual ||
        (residual == best_residual && dist < best_dist)) {
      have_best = true;
      best_residual = residual;
      best_dist = dist;
      best.tau = tau;
      best.amplitude = corr / static_cast<double>(n);
      best.residual_energy = residual;
      best.correlation_power = corr_power;
    }
  }
  return best;
}

RangeEstimate refine_range(const EchoFrame& frame, const RangeEstimate& coarse,
                           const RefineParams& params) {
  if (frame.y.size() == 0) throw EmptyFrame();
  const OfdmConfig& cfg = frame.config;
  if (params.half_candidates < 0 || params.lattice_exponent < 0) throw CandidateSetEmpty();

  const size_t grid =
      next_pow2(static_cast<size_t>(cfg.n_subcarriers) * static_cast<size_t>(params.pad_factor));
  const double bin_tau = 1.0 / (static_cast<double>(grid) * cfg.subcarrier_spacing);
  const double delta_tau = bin_tau / std::pow(2.0, params.lattice_exponent);

  const double tau_center = 2.0 * coarse.range / kSpeedOfLight;
  const double tau_max = cfg.unambiguous_delay();
  std::vector<double> candidates;
  candidates.reserve(2 * static_cast<size_t>(params.half_candidates) + 1);
  for (int k = -params.half_candidates; k <= params.half_candidates; ++k) {
    const double tau = tau_center + k * delta_tau;
    if (tau >= 0.0 && tau < tau_max) candidates.push_back(tau);
  }
  if (candidates.empty()) throw CandidateSetEmpty();

  const Eigen::VectorXcd g = compress_symbols(frame);
  const DelaySearchResult best = delay_matched_filter(g, cfg.subcarrier_spacing, candidates,
                                                      tau_center);

  RangeEstimate est;
  est.method = RangeMethod::refined;
  est.rx_station = frame.rx_station;
  est.range = kSpeedOfLight * best.tau / 2.0;
  est.snr_linear = coarse.snr_linear > 0.0 ? coarse.snr_linear : estimate_snr_linear(frame);
  est.variance = variance_from_snr(cfg, est.snr_linear);
  est.peak_to_floor_db = coarse.peak_to_floor_db;
  return est;
}

double doppler_estimate(const EchoFrame& frame, int pad_factor, std::optional<double> tau_s) {
  if (frame.y.size() == 0) throw EmptyFrame();
  const OfdmConfig& cfg = frame.config;
  if (cfg.n_symbols < 2) throw SingleSymbolFrame();

  double tau = 0.0;
  if (tau_s) {
    tau = *tau_s;
  } else {
    const RangeEstimate c = coarse_range(frame, {.pad_factor = pad_factor});
    tau = 2.0 * c.range / kSpeedOfLight;
  }

  // Subcarrier-domain compression with delay compensation.
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(cfg.n_symbols);
  for (int m = 0; m < cfg.n_symbols; ++m) {
    cdouble acc(0.0, 0.0);
    const cdouble step = std::polar(1.0, 2.0 * kPi * cfg.subcarrier_spacing * tau);
    cdouble w(1.0, 0.0);
    for (int n = 0; n < cfg.n_subcarriers; ++n) {
      acc += frame.y(n, m) * std::conj(frame.x_ref(n, m)) * w;
      w *= step;
    }
    q(m) = acc / static_cast<double>(cfg.n_subcarriers);
  }

  // Forward padded DFT across symbols; the +j Doppler ramp lands on bin
  // f_D * T * size.
  const size_t size = next_pow2(static_cast<size_t>(cfg.n_symbols) *
                                static_cast<size_t>(pad_factor));
  std::vector<cdouble> buf(size, cdouble(0.0, 0.0));
  for (int m = 0; m < cfg.n_symbols; ++m) buf[static_cast<size_t>(m)] = q(m);
  fft_inplace(buf, /*inverse=*/false);

  size_t peak = 0;
  double peak_power = -1.0;
  for (size_t k = 0; k < size; ++k) {
    const double p = std::norm(buf[k]);
    if (p > peak_power) {
      peak_power = p;
      peak = k;
    }
  }
  const double t_sym = cfg.symbol_time();
  double k_signed = static_cast<double>(peak);
  if (k_signed > static_cast<double>(size) / 2.0) k_signed -= static_cast<double>(size);
  return k_signed / (static_cast<double>(size) * t_sym);
}

double aoa_estimate(const std::vector<EchoFrame>& per_antenna, const ArrayConfig& array) {
  if (array.antenna_count < 2 || per_antenna.size() < 2) throw InsufficientAntennas();
  if (per_antenna.size() != static_cast<size_t>(array.antenna_count)) {
    throw ConfigMismatch("one frame per antenna element required");
  }
  for (const auto& f : per_antenna) {
    if (!(f.config == per_antenna.front().config)) {
      throw ConfigMismatch("per-antenna frames must share the OFDM config");
    }
  }

  // Locate the common delay peak on the summed power profile, then take the
  // per-antenna complex snapshots at that bin.
  const int pad = 8;
  std::vector<DelayProfile> profiles;
  profiles.reserve(per_antenna.size());
  for (const auto& f : per_antenna) profiles.push_back(delay_profile(f, pad));

  const Eigen::Index bins = profiles.front().values.size();
  Eigen::VectorXd power = Eigen::VectorXd::Zero(bins);
  for (const auto& p : profiles) power += p.values.cwiseAbs2();
  Eigen::Index peak_bin = 0;
  power.maxCoeff(&peak_bin);

  Eigen::VectorXcd snapshot(array.antenna_count);
  for (int k = 0; k < array.antenna_count; ++k) {
    snapshot(k) = profiles[static_cast<size_t>(k)].values(peak_bin);
  }

  const double step_deg = 0.1;
  const int n_grid = static_cast<int>(std::round(180.0 / step_deg)) + 1;
  std::vector<double> score(static_cast<size_t>(n_grid));
  int best = 0;
  for (int i = 0; i < n_grid; ++i) {
    const double angle = (-90.0 + i * step_deg) * kPi / 180.0;
    const Eigen::VectorXcd a = steering_vector(array.antenna_count, array.antenna_spacing,
                                               angle, array.carrier_frequency);
    score[static_cast<size_t>(i)] = std::norm(a.dot(snapshot));  // a^H * snapshot
    if (score[static_cast<size_t>(i)] > score[static_cast<size_t>(best)]) best = i;
  }

  double refined = -90.0 + best * step_deg;
  if (best > 0 && best < n_grid - 1) {
    const double y0 = score[static_cast<size_t>(best - 1)];
    const double y1 = score[static_cast<size_t>(best)];
    const double y2 = score[static_cast<size_t>(best + 1)];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-30) {
      refined += 0.5 * (y0 - y2) / denom * step_deg;
    }
  }
  return refined * kPi / 180.0;
}

double crlb_range_snr_product(const OfdmConfig& config) {
  const double n = config.n_subcarriers;
  const double m = config.n_symbols;
  const double s1 = n * (n - 1.0) / 2.0;
  const double s2 = n * (n - 1.0) * (2.0 * n - 1.0) / 6.0;
  const double centered = s2 - s1 * s1 / n;  // N * var(n)
  const double w = 2.0 * kPi * config.subcarrier_spacing;
  if (centered <= 0.0) throw SingularFim("delay is unidentifiable with a single subcarrier");
  const double crlb_tau_times_snr = 1.0 / (2.0 * w * w * m * centered);
  const double half_c = kSpeedOfLight / 2.0;
  return half_c * half_c * crlb_tau_times_snr;
}

CrlbReport crlb_range(const EchoChannel& channel, const OfdmConfig& config,
                      double noise_variance) {
  config.validate();
  if (noise_variance <= 0.0) throw InvalidConfig("noise_variance", "must be positive");
  const double amp2 = std::norm(channel.alpha);
  if (amp2 <= 0.0) throw InvalidConfig("channel.alpha", "must be nonzero");

  const double n = config.n_subcarriers;
  const double m = config.n_symbols;
  const double a = channel.alpha.real();
  const double b = channel.alpha.imag();
  const double c1 = 2.0 / noise_variance;
  const double wn = 2.0 * kPi * config.subcarrier_spacing;
  const double wm = 2.0 * kPi * config.symbol_time();

  const double s1n = n * (n - 1.0) / 2.0;
  const double s2n = n * (n - 1.0) * (2.0 * n - 1.0) / 6.0;
  const double s1m = m * (m - 1.0) / 2.0;
  const double s2m = m * (m - 1.0) * (2.0 * m - 1.0) / 6.0;

  Eigen::Matrix4d fim = Eigen::Matrix4d::Zero();
  fim(0, 0) = c1 * amp2 * wn * wn * s2n * m;
  fim(1, 1) = c1 * amp2 * wm * wm * s2m * n;
  fim(0, 1) = fim(1, 0) = -c1 * amp2 * wn * wm * s1n * s1m;
  fim(0, 2) = fim(2, 0) = c1 * wn * s1n * m * b;
  fim(0, 3) = fim(3, 0) = -c1 * wn * s1n * m * a;
  fim(1, 2) = fim(2, 1) = -c1 * wm * s1m * n * b;
  fim(1, 3) = fim(3, 1) = c1 * wm * s1m * n * a;
  fim(2, 2) = c1 * n * m;
  fim(3, 3) = c1 * n * m;

  // The parameters live on wildly different scales (seconds vs amplitude),
  // so invert the diagonally-normalized matrix and scale back.
  Eigen::Vector4d d;
  for (int i = 0; i < 4; ++i) {
    if (fim(i, i) <= 0.0) {
      throw SingularFim(
          "Fisher information is singular (insufficient frequency or time diversity)");
    }
    d(i) = 1.0 / std::sqrt(fim(i, i));
  }
  const Eigen::Matrix4d scaled = d.asDiagonal() * fim * d.asDiagonal();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(scaled);
  lu.setThreshold(1e-10);
  if (lu.rank() < 4) {
    throw SingularFim("Fisher information is singular");
  }

  CrlbReport report;
  report.fim = fim;
  const Eigen::Matrix4d inv = d.asDiagonal() * lu.inverse() * d.asDiagonal();
  report.crlb_tau = inv(0, 0);
  const double half_c = kSpeedOfLight / 2.0;
  report.crlb_range = half_c * half_c * report.crlb_tau;
  report.snr_linear = amp2 / noise_variance;
  return report;
}

}  // namespace isaccoop
