#include <algorithm>
#include <cmath>

#include "isaccoop/comp.hpp"
#include "isaccoop/fusion.hpp"
#include "isaccoop/harness.hpp"
#include "isaccoop/ranging.hpp"

namespace isaccoop {

namespace {

using nlohmann::json;

OfdmConfig ofdm_from_json(const json& j, double carrier_hz) {
  OfdmConfig cfg;
  cfg.n_subcarriers = j.value("n_subcarriers", 64);
  cfg.n_symbols = j.value("n_symbols", 14);
  cfg.subcarrier_spacing = j.at("subcarrier_spacing_hz").get<double>();
  cfg.symbol_duration = j.value("symbol_duration_s", 0.0);
  cfg.carrier_frequency = j.value("carrier_frequency_hz", carrier_hz);
  return cfg;
}

PathLossParams path_loss_from_json(const json& j) {
  PathLossParams p;
  p.exponent_los = j.value("exponent_los", 2.0);
  p.exponent_nlos = j.value("exponent_nlos", 3.5);
  p.reference_distance = j.value("reference_distance_m", 1.0);
  return p;
}

Target random_target(const json& cfg, RngStream& rng) {
  const auto& region = cfg.at("target_region");
  Target t;
  t.position.x() = rng.uniform(region[0].get<double>(), region[1].get<double>());
  t.position.y() = rng.uniform(region[2].get<double>(), region[3].get<double>());
  t.position.z() = cfg.value("target_height", 1.0);
  t.rcs = cfg.value("target_rcs_m2", 1.0);
  return t;
}

/// Transmit-side illumination power gain towards `angle` for one station,
/// including the coherent receive array gain.  "digital" steers exactly;
/// "hybrid" projects the steering beam onto the RF-chain architecture.
double illumination_gain(const BaseStation& bs, double angle, const std::string& beamforming,
                         int rf_chains) {
  const int n = bs.antenna_count;
  const Eigen::VectorXcd a = steering_vector(n, bs.spacing(), angle, bs.carrier_frequency);
  double tx_gain = static_cast<double>(n);
  if (beamforming == "hybrid" && rf_chains < n) {
    Eigen::VectorXcd w = a / std::sqrt(static_cast<double>(n));
    Eigen::VectorXcd wh = hybrid_factorize(w, rf_chains);
    const double norm = wh.norm();
    if (norm > 0.0) wh /= norm;
    tx_gain = std::norm(a.dot(wh));
  }
  return tx_gain * static_cast<double>(n);
}

struct NodeResult {
  bool detected = false;
  bool los = true;
  double true_range = 0.0;
  RangeEstimate coarse;
  RangeEstimate refined;
  EchoFrame frame;
};

struct SenseOptions {
  PathLossParams path_loss;
  double gate_db = 11.0;
  std::string beamforming = "digital";
  int rf_chains = 0;
};

NodeResult sense_node(const Scenario& scenario, const BaseStation& bs, const Target& target,
                      const OfdmConfig& ofdm, double tx_power_dbm, double noise_psd_dbm_hz,
                      const SenseOptions& options, RngStream& rng) {
  NodeResult node;
  node.true_range = (target.position - bs.position).norm();

  const double angle = azimuth_from_broadside(bs, target.position);
  const double illum = dbm_to_mw(tx_power_dbm) *
                       illumination_gain(bs, angle, options.beamforming, options.rf_chains);

  EchoOptions echo_options;
  echo_options.path_loss = options.path_loss;
  RngStream ch_rng = rng.substream(1);
  EchoChannel channel = make_echo_channel(scenario, bs, bs, target, illum, ch_rng,
                                          echo_options);
  node.los = channel.los;
  if (channel.tau >= 0.98 * ofdm.unambiguous_delay()) {
    throw InvalidConfig("scene", "echo delay exceeds the unambiguous window of the OFDM config");
  }

  RngStream grid_rng = rng.substream(2);
  RngStream noise_rng = rng.substream(3);
  const Eigen::MatrixXcd x = make_tx_grid(ofdm, grid_rng);
  node.frame = synthesize_echo(x, {channel}, ofdm, noise_psd_dbm_hz, noise_rng,
                               bs.clock_offset);

  node.coarse = coarse_range(node.frame);
  node.detected = node.coarse.peak_to_floor_db >= options.gate_db;
  node.refined = refine_range(node.frame, node.coarse);
  return node;
}

/// Weighted multilateration with a weak search-region prior and an iterative
/// trim of grossly inconsistent ranges.  When the trim leaves a single
/// survivor, its index (into the original list) is reported instead of a fix.
struct TrimmedFix {
  std::optional<PositionEstimate> fix;
  size_t survivor = 0;
};

TrimmedFix fuse_with_trim(std::vector<RangeObservation> obs, const PositionPrior& prior,
                          double trim_threshold) {
  std::vector<size_t> index(obs.size());
  for (size_t i = 0; i < index.size(); ++i) index[i] = i;
  while (true) {
    if (obs.size() == 1) return {.fix = std::nullopt, .survivor = index.front()};
    PositionEstimate fix = midend_fuse(obs, prior.mean, prior);
    size_t worst = 0;
    double worst_score = 0.0;
    for (size_t i = 0; i < obs.size(); ++i) {
      const double residual =
          std::abs((fix.position - obs[i].rx_position).norm() - obs[i].range);
      const double score = residual / std::sqrt(obs[i].variance);
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    if (worst_score <= trim_threshold) return {.fix = fix, .survivor = 0};
    obs.erase(obs.begin() + static_cast<long>(worst));
    index.erase(index.begin() + static_cast<long>(worst));
  }
}

// ---------------------------------------------------------------------------
// fig5b: multi-frequency cooperative gain on the default obstacle field.
// ---------------------------------------------------------------------------

TrialOutcome fig5b_trial(const json& cfg, RngStream& rng) {
  ScenarioConfig scfg = ScenarioConfig::from_json(cfg.at("scenario"));
  scfg.master_seed = rng.next_u64();  // fresh obstacle field per trial
  const Scenario scenario = build_scenario(scfg);
  RngStream target_rng = rng.substream(11);
  const Target target = random_target(cfg, target_rng);

  const std::string group = cfg.at("group").get<std::string>();
  const auto& ids = cfg.at("groups").at(group);

  TrialOutcome out;
  bool any_los = false;
  const NodeResult* best = nullptr;
  std::vector<NodeResult> nodes;
  nodes.reserve(ids.size());
  uint64_t node_key = 100;
  for (const auto& id : ids) {
    const BaseStation& bs = scenario.station(id.get<std::string>());
    const std::string band = bs.band_class() == BandClass::high ? "high" : "low";
    const OfdmConfig ofdm = ofdm_from_json(cfg.at("ofdm_by_band").at(band),
                                           bs.carrier_frequency);
    SenseOptions options;
    options.path_loss = path_loss_from_json(cfg.at("path_loss_by_band").at(band));
    options.gate_db = cfg.value("detection_gate_db", 14.0);
    RngStream node_rng = rng.substream(node_key++);
    nodes.push_back(sense_node(scenario, bs, target, ofdm, cfg.at("tx_power_dbm").get<double>(),
                               cfg.value("noise_psd_dbm_hz", -174.0), options, node_rng));
    if (nodes.back().los) any_los = true;
  }
  out.samples["los_probability"] = any_los ? 1.0 : 0.0;

  for (const auto& n : nodes) {
    if (n.detected && (best == nullptr || n.refined.variance < best->refined.variance)) {
      best = &n;
    }
  }
  if (best == nullptr) {
    out.failed = true;  // no node saw the target
    return out;
  }
  out.samples["rmse_range"] = best->refined.range - best->true_range;
  return out;
}

// ---------------------------------------------------------------------------
// fig5c: multi-node cooperative ranging accuracy (all stations at 0.34 THz).
// ---------------------------------------------------------------------------

TrialOutcome fig5c_trial(const json& cfg, RngStream& rng) {
  ScenarioConfig scfg = ScenarioConfig::from_json(cfg.at("scenario"));
  scfg.master_seed = rng.next_u64();
  const Scenario scenario = build_scenario(scfg);
  RngStream target_rng = rng.substream(11);
  const Target target = random_target(cfg, target_rng);

  const int k = cfg.at("cooperating_stations").get<int>();
  const OfdmConfig ofdm = ofdm_from_json(cfg.at("ofdm"),
                                         scenario.base_stations.front().carrier_frequency);
  SenseOptions options;
  options.path_loss = path_loss_from_json(cfg.at("path_loss"));
  options.gate_db = cfg.value("detection_gate_db", 11.0);
  options.beamforming = cfg.value("beamforming", std::string("digital"));
  options.rf_chains = cfg.value("rf_chains", 4);

  std::vector<NodeResult> nodes;
  bool any_los = false;
  for (int i = 0; i < k; ++i) {
    const BaseStation& bs = scenario.base_stations[static_cast<size_t>(i)];
    RngStream node_rng = rng.substream(100 + static_cast<uint64_t>(i));
    nodes.push_back(sense_node(scenario, bs, target, ofdm, cfg.at("tx_power_dbm").get<double>(),
                               cfg.value("noise_psd_dbm_hz", -174.0), options, node_rng));
    if (nodes.back().los) any_los = true;
  }

  TrialOutcome out;
  out.samples["los_probability"] = any_los ? 1.0 : 0.0;

  // Sensing outage: with every selected link blocked there is nothing to
  // estimate; the trial is recorded as failed.
  if (!any_los) {
    out.failed = true;
    return out;
  }

  std::vector<const NodeResult*> valid;
  for (const auto& n : nodes) {
    if (n.detected) valid.push_back(&n);
  }
  if (valid.empty()) {
    out.failed = true;
    return out;
  }

  // Best detected node's acquisition error (single-node baseline).
  const NodeResult* best = nullptr;
  for (const auto* n : valid) {
    if (best == nullptr || n->refined.variance < best->refined.variance) best = n;
  }
  out.samples["rmse_range_coarse"] = best->coarse.range - best->true_range;

  if (k == 1 || valid.size() == 1) {
    out.samples["rmse_range"] = valid.front()->refined.range - valid.front()->true_range;
    return out;
  }

  std::vector<RangeObservation> obs;
  for (const auto* n : valid) {
    const BaseStation& bs = scenario.station(n->frame.rx_station);
    RangeObservation o;
    o.rx_position = bs.position.head<2>();
    // Slant range projected onto the plane with the known height offset.
    const double dz = bs.position.z() - target.position.z();
    const double r = n->refined.range;
    o.range = std::sqrt(std::max(r * r - dz * dz, 1e-12));
    o.variance = n->refined.variance;
    o.station = n->frame.rx_station;
    obs.push_back(std::move(o));
  }
  PositionPrior prior;
  const auto& region = cfg.at("target_region");
  prior.mean = {0.5 * (region[0].get<double>() + region[1].get<double>()),
                0.5 * (region[2].get<double>() + region[3].get<double>())};
  prior.stddev = cfg.value("prior_std_m", 1.0);

  try {
    const TrimmedFix trimmed =
        fuse_with_trim(obs, prior, cfg.value("trim_threshold", 8.0));
    double err = 0.0;
    if (trimmed.fix) {
      err = (trimmed.fix->position - target.position.head<2>()).norm();
      out.samples["rmse_position"] = err;
    } else {
      const NodeResult* survivor = valid[trimmed.survivor];
      err = std::abs(survivor->refined.range - survivor->true_range);
    }
    out.samples["rmse_range"] = err;
  } catch (const Error&) {
    out.failed = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// fig5d: CoMP joint-transmission spectral efficiency.
// ---------------------------------------------------------------------------

TrialOutcome fig5d_trial(const json& cfg, RngStream& rng) {
  ScenarioConfig scfg = ScenarioConfig::from_json(cfg.at("scenario"));
  scfg.master_seed = rng.next_u64();
  const Scenario scenario = build_scenario(scfg);

  RngStream user_rng = rng.substream(11);
  const auto& region = cfg.at("user_region");
  Eigen::Vector3d user(user_rng.uniform(region[0].get<double>(), region[1].get<double>()),
                       user_rng.uniform(region[2].get<double>(), region[3].get<double>()),
                       cfg.value("user_height", 1.0));

  const int k = cfg.at("cooperating_stations").get<int>();
  const bool coherent = cfg.at("jt_mode").get<std::string>() == "coherent";
  const double pt_mw = dbm_to_mw(cfg.at("tx_power_dbm").get<double>());

  CommOptions comm_options;
  comm_options.path_loss = path_loss_from_json(cfg.at("path_loss"));

  std::vector<CommChannel> channels;
  std::vector<Eigen::VectorXcd> weights;
  for (int i = 0; i < k; ++i) {
    const BaseStation& bs = scenario.base_stations[static_cast<size_t>(i)];
    RngStream ch_rng = rng.substream(100 + static_cast<uint64_t>(i));
    CommChannel ch = make_comm_channel(scenario, bs, user, ch_rng, comm_options);
    const double norm = ch.h.norm();
    // Maximum-ratio transmission at the per-station power budget.
    Eigen::VectorXcd w = norm > 0.0
                             ? Eigen::VectorXcd(std::sqrt(pt_mw) * ch.h / norm)
                             : Eigen::VectorXcd::Zero(ch.h.size());
    channels.push_back(std::move(ch));
    weights.push_back(std::move(w));
  }

  const double noise_mw = dbm_to_mw(noise_power_dbm(
      cfg.value("noise_psd_dbm_hz", -174.0),
      scenario.base_stations.front().bandwidth));

  TrialOutcome out;
  out.samples["spectral_efficiency"] =
      jt_spectral_efficiency(channels, weights, noise_mw, coherent);
  return out;
}

// ---------------------------------------------------------------------------
// fig6: minimum-power cooperative beamforming under SINR + CRLB constraints.
// ---------------------------------------------------------------------------

TrialOutcome fig6_trial(const json& cfg, RngStream& rng) {
  ScenarioConfig scfg = ScenarioConfig::from_json(cfg.at("scenario"));
  const Scenario scenario = build_scenario(scfg);

  const int k = cfg.at("station_count").get<int>();
  PowerMinSpec spec;
  spec.sinr_target_db = cfg.at("sinr_target_db").get<double>();
  spec.crlb_bound_m2 = cfg.at("crlb_bound_m2").get<double>();
  for (int i = 0; i < k; ++i) {
    spec.candidate_stations.push_back(scenario.base_stations[static_cast<size_t>(i)].id);
  }
  const auto& user = cfg.at("user");
  spec.comm_user = {user[0].get<double>(), user[1].get<double>(), user[2].get<double>()};
  spec.sense_target = scenario.targets.front().position;

  PowerProblemOptions options;
  options.ofdm = ofdm_from_json(cfg.at("ofdm"),
                                scenario.base_stations.front().carrier_frequency);
  options.noise_psd_dbm_hz = cfg.value("noise_psd_dbm_hz", -174.0);
  options.comm_bandwidth_hz = cfg.value("comm_bandwidth_hz", 1e6);
  options.comm_rician = RicianParams{cfg.value("rician_k_db", 5.0)};

  RngStream ch_rng = rng.substream(7);
  const PowerMinProblem problem = build_power_problem(scenario, spec, options, ch_rng);

  const std::string method = cfg.at("method").get<std::string>();
  const BeamformingSolution sol = method == "sdr" ? min_power_sdr(problem)
                                                  : min_power_crlb_approx(problem);
  TrialOutcome out;
  out.samples["min_power_dbm"] = sol.total_power_dbm;
  out.samples["crlb_range"] = sol.achieved_crlb_m2;
  return out;
}

// ---------------------------------------------------------------------------
// simulate: user-supplied scenario with a selectable fusion level.
// ---------------------------------------------------------------------------

TrialOutcome simulate_trial(const json& cfg, RngStream& rng) {
  ScenarioConfig scfg = ScenarioConfig::from_json(cfg.at("scenario"));
  const Scenario scenario = build_scenario(scfg);
  if (scenario.targets.empty()) {
    throw InvalidConfig("scenario.targets", "simulate needs at least one target");
  }
  const Target& target = scenario.targets.front();
  const std::string fusion = cfg.value("fusion", std::string("mid"));

  const OfdmConfig base_ofdm =
      cfg.contains("ofdm") ? ofdm_from_json(cfg.at("ofdm"),
                                            scenario.base_stations.front().carrier_frequency)
                           : OfdmConfig{};
  SenseOptions options;
  if (cfg.contains("path_loss")) options.path_loss = path_loss_from_json(cfg.at("path_loss"));
  options.gate_db = cfg.value("detection_gate_db", 11.0);
  const double pt_dbm = cfg.value("tx_power_dbm", 20.0);
  const double psd = cfg.value("noise_psd_dbm_hz", -174.0);

  std::vector<NodeResult> nodes;
  bool any_los = false;
  for (size_t i = 0; i < scenario.base_stations.size(); ++i) {
    const BaseStation& bs = scenario.base_stations[i];
    OfdmConfig ofdm = base_ofdm;
    ofdm.carrier_frequency = bs.carrier_frequency;
    RngStream node_rng = rng.substream(100 + i);
    nodes.push_back(sense_node(scenario, bs, target, ofdm, pt_dbm, psd, options, node_rng));
    if (nodes.back().los) any_los = true;
  }

  TrialOutcome out;
  out.samples["los_probability"] = any_los ? 1.0 : 0.0;

  const NodeResult* best = nullptr;
  for (const auto& n : nodes) {
    if (n.detected && (best == nullptr || n.refined.variance < best->refined.variance)) best = &n;
  }
  if (best == nullptr) {
    out.failed = true;
    return out;
  }
  out.samples["rmse_range"] = best->refined.range - best->true_range;

  if (fusion == "front") {
    std::vector<EchoFrame> frames;
    for (auto& n : nodes) frames.push_back(n.frame);
    const FrontendResult fr = frontend_fuse(frames);
    out.samples["rmse_range"] = fr.estimate.range - nodes.front().true_range;
  } else if (fusion == "symbol") {
    // Truth-assisted delay alignment to the first node, then phase-calibrated
    // accumulation of the delay profiles.
    std::vector<DelayProfile> profiles;
    for (auto& n : nodes) {
      EchoFrame aligned = n.frame;
      const double dtau = n.frame.truth.front().tau - nodes.front().frame.truth.front().tau;
      aligned = apply_clock_offset(aligned, -dtau);
      profiles.push_back(delay_profile(aligned));
    }
    const size_t ref = strongest_profile(profiles);
    const DelayProfile fused = symbol_level_fuse(profiles, calibration_phases(profiles, ref));
    out.samples["rmse_range"] = profile_peak_range(fused) - nodes.front().true_range;
  } else if (fusion == "mid") {
    std::vector<RangeObservation> obs;
    for (const auto& n : nodes) {
      if (!n.detected) continue;
      obs.push_back({scenario.station(n.frame.rx_station).position.head<2>(), n.refined.range,
                     n.refined.variance, n.frame.rx_station});
    }
    if (obs.size() >= 3) {
      const PositionEstimate fix = midend_fuse(obs);
      out.samples["rmse_position"] =
          (fix.position - target.position.head<2>()).norm();
    }
  } else if (fusion == "back") {
    std::vector<PositionEstimate> fixes;
    for (const auto& n : nodes) {
      if (!n.detected) continue;
      const BaseStation& bs = scenario.station(n.frame.rx_station);
      if (bs.antenna_count < 2) continue;
      // Per-antenna frames for the local angle estimate.
      RngStream aoa_rng = rng.substream(5000 + fixes.size());
      const double angle = azimuth_from_broadside(bs, target.position);
      const Eigen::VectorXcd steer =
          steering_vector(bs.antenna_count, bs.spacing(), angle, bs.carrier_frequency);
      std::vector<EchoFrame> per_antenna;
      for (int a = 0; a < bs.antenna_count; ++a) {
        EchoFrame f = n.frame;
        std::vector<EchoChannel> truth = n.frame.truth;
        truth.front().alpha *= steer(a);
        RngStream noise_rng = aoa_rng.substream(static_cast<uint64_t>(a));
        f = synthesize_echo(n.frame.x_ref, truth, f.config, psd, noise_rng, 0.0);
        per_antenna.push_back(std::move(f));
      }
      const double aoa = aoa_estimate(per_antenna,
                                      {bs.antenna_count, bs.spacing(), bs.carrier_frequency});
      const double aoa_var = 1e-6 + 6.0 / (std::max(n.refined.snr_linear, 1e-6) *
                                           static_cast<double>(n.frame.y.size()) *
                                           std::pow(kPi * std::cos(angle), 2) *
                                           bs.antenna_count * (bs.antenna_count * bs.antenna_count - 1.0));
      fixes.push_back(local_fix_from_range_aoa(bs, n.refined, aoa, aoa_var));
    }
    if (!fixes.empty()) {
      const PositionEstimate fix = backend_fuse(fixes);
      out.samples["rmse_position"] =
          (fix.position - target.position.head<2>()).norm();
    }
  } else {
    throw InvalidConfig("fusion", "unknown fusion level '" + fusion + "'");
  }
  return out;
}

json thz_station(const std::string& id, double x, double y, double z) {
  return {{"id", id},
          {"position", {x, y, z}},
          {"carrier_frequency_hz", 0.34e12},
          {"bandwidth_hz", 1e9},
          {"antenna_count", 16},
          {"max_power_dbm", 0.0},
          {"rf_chain_count", 4}};
}

}  // namespace

TrialRunner find_trial_runner(const std::string& kind) {
  if (kind == "fig5b") return fig5b_trial;
  if (kind == "fig5c") return fig5c_trial;
  if (kind == "fig5d") return fig5d_trial;
  if (kind == "fig6") return fig6_trial;
  if (kind == "simulate") return simulate_trial;
  throw UnknownPreset(kind);
}

std::vector<std::string> preset_names() { return {"fig5b", "fig5c", "fig5d", "fig6"}; }

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec spec;
  spec.name = name;
  spec.kind = name;

  if (name == "fig5b") {
    spec.trials = 500;
    spec.seed = 101;
    spec.outputs = {"rmse_range", "los_probability"};
    spec.base_config = {
        {"scenario",
         {{"area", {{"width", 500.0}, {"depth", 500.0}}},
          {"master_seed", 1},
          {"base_stations",
           {{{"id", "hf1"}, {"position", {150.0, 250.0, 25.0}},
             {"carrier_frequency_hz", 0.34e12}, {"bandwidth_hz", 1e9}, {"antenna_count", 16},
             {"max_power_dbm", 20.0}},
            {{"id", "hf2"}, {"position", {350.0, 250.0, 25.0}},
             {"carrier_frequency_hz", 0.34e12}, {"bandwidth_hz", 1e9}, {"antenna_count", 16},
             {"max_power_dbm", 20.0}},
            {{"id", "lf1"}, {"position", {250.0, 150.0, 25.0}},
             {"carrier_frequency_hz", 28e9}, {"bandwidth_hz", 95e6}, {"antenna_count", 8},
             {"max_power_dbm", 20.0}},
            {{"id", "lf2"}, {"position", {250.0, 350.0, 25.0}},
             {"carrier_frequency_hz", 28e9}, {"bandwidth_hz", 95e6}, {"antenna_count", 8},
             {"max_power_dbm", 20.0}}}},
          {"obstacles",
           {{"count", 40}, {"min_size_m", 10.0}, {"max_size_m", 60.0},
            {"min_height_m", 5.0}, {"max_height_m", 30.0}}}}},
        {"ofdm_by_band",
         {{"high",
           {{"n_subcarriers", 8192}, {"n_symbols", 14},
            {"subcarrier_spacing_hz", 1e9 / 8192}}},
          {"low",
           {{"n_subcarriers", 512}, {"n_symbols", 14},
            {"subcarrier_spacing_hz", 95e6 / 512}}}}},
        {"path_loss_by_band",
         {{"high", {{"exponent_los", 2.0}, {"exponent_nlos", 6.0}}},
          {"low", {{"exponent_los", 2.0}, {"exponent_nlos", 2.8}}}}},
        {"groups",
         {{"hf_single", {"hf1"}},
          {"hf_coop", {"hf1", "hf2"}},
          {"lf_single", {"lf1"}},
          {"lf_coop", {"lf1", "lf2"}},
          {"hf_lf_coop", {"hf1", "hf2", "lf1", "lf2"}}}},
        {"group", "hf_single"},
        {"target_region", {200.0, 300.0, 200.0, 300.0}},
        {"target_height", 1.5},
        {"tx_power_dbm", 20.0},
        {"noise_psd_dbm_hz", -174.0},
        {"detection_gate_db", 14.0},
    };
    spec.sweep = {{"/group",
                   {"hf_single", "hf_coop", "lf_single", "lf_coop", "hf_lf_coop"}}};
  } else if (name == "fig5c") {
    spec.trials = 200;
    spec.seed = 202;
    spec.outputs = {"rmse_range", "rmse_range_coarse", "rmse_position", "los_probability"};
    spec.base_config = {
        {"scenario",
         {{"area", {{"width", 10.0}, {"depth", 10.0}}},
          {"master_seed", 1},
          {"base_stations",
           {thz_station("bs1", 0.5, 0.5, 2.0), thz_station("bs2", 9.5, 0.5, 2.0),
            thz_station("bs3", 9.5, 9.5, 2.0), thz_station("bs4", 0.5, 9.5, 2.0)}},
          {"obstacles",
           {{"count", 2}, {"min_size_m", 0.5}, {"max_size_m", 1.5},
            {"min_height_m", 2.0}, {"max_height_m", 3.0}}}}},
        {"ofdm",
         {{"n_subcarriers", 64}, {"n_symbols", 14}, {"subcarrier_spacing_hz", 1e9 / 64}}},
        {"path_loss", {{"exponent_los", 2.0}, {"exponent_nlos", 8.0}}},
        {"target_region", {4.0, 6.0, 4.0, 6.0}},
        {"target_height", 1.0},
        {"tx_power_dbm", -16.5},
        {"noise_psd_dbm_hz", -174.0},
        {"detection_gate_db", 6.0},
        {"prior_std_m", 1.0},
        {"trim_threshold", 8.0},
        {"cooperating_stations", 4},
        {"beamforming", "digital"},
        {"rf_chains", 4},
    };
    spec.sweep = {{"/cooperating_stations", {1, 2, 3, 4}},
                  {"/beamforming", {"digital", "hybrid"}}};
  } else if (name == "fig5d") {
    spec.trials = 200;
    spec.seed = 303;
    spec.outputs = {"spectral_efficiency"};
    spec.base_config = {
        {"scenario",
         {{"area", {{"width", 10.0}, {"depth", 10.0}}},
          {"master_seed", 1},
          {"base_stations",
           {thz_station("bs1", 0.5, 0.5, 2.0), thz_station("bs2", 9.5, 9.5, 2.0),
            thz_station("bs3", 0.5, 9.5, 2.0), thz_station("bs4", 9.5, 0.5, 2.0)}},
          {"obstacles",
           {{"count", 4}, {"min_size_m", 0.5}, {"max_size_m", 1.5},
            {"min_height_m", 2.0}, {"max_height_m", 3.0}}}}},
        {"path_loss", {{"exponent_los", 2.0}, {"exponent_nlos", 8.0}}},
        {"user_region", {4.0, 6.0, 4.0, 6.0}},
        {"user_height", 1.0},
        {"tx_power_dbm", 20.0},
        {"noise_psd_dbm_hz", -174.0},
        {"jt_mode", "coherent"},
        {"cooperating_stations", 4},
    };
    spec.sweep = {{"/cooperating_stations", {1, 2, 3, 4}},
                  {"/jt_mode", {"coherent", "non_coherent"}}};
  } else if (name == "fig6") {
    spec.trials = 10;
    spec.seed = 404;
    spec.outputs = {"min_power_dbm", "crlb_range"};
    json stations = json::array();
    for (int i = 0; i < 4; ++i) {
      stations.push_back({{"id", "bs" + std::to_string(i + 1)},
                          {"position", {40.0 + 40.0 * i, 40.0, 10.0}},
                          {"carrier_frequency_hz", 6e9},
                          {"bandwidth_hz", 1e6},
                          {"antenna_count", 4},
                          {"max_power_dbm", 40.0}});
    }
    spec.base_config = {
        {"scenario",
         {{"area", {{"width", 600.0}, {"depth", 600.0}}},
          {"master_seed", 1},
          {"base_stations", stations},
          {"targets", {{{"position", {100.0, 55.0, 1.0}}, {"rcs_m2", 1.0}}}},
          {"obstacles", {{"count", 0}}}}},
        {"ofdm",
         {{"n_subcarriers", 64}, {"n_symbols", 14}, {"subcarrier_spacing_hz", 1e6 / 64}}},
        {"user", {100.0, 560.0, 1.5}},
        {"sinr_target_db", 10.0},
        {"crlb_bound_m2", 0.03},
        {"method", "approx"},
        {"station_count", 2},
        {"noise_psd_dbm_hz", -174.0},
        {"comm_bandwidth_hz", 1e6},
        {"rician_k_db", 5.0},
    };
    spec.sweep = {{"/sinr_target_db", {0.0, 5.0, 10.0, 15.0, 20.0}},
                  {"/crlb_bound_m2", {0.03, 0.01}},
                  {"/method", {"sdr", "approx"}},
                  {"/station_count", {2, 3}}};
  } else {
    throw UnknownPreset(name);
  }
  return spec;
}

}  // namespace isaccoop
