// Cooperative ISAC network simulator CLI.
//
// Subcommands:
//   experiment <preset>   Monte-Carlo presets with CSV/SVG output
//   simulate              ranging + fusion on a user scenario JSON
//   crlb                  delay-estimation CRLB report as JSON
//   optimize              minimum-power cooperative beamforming as JSON
//
// Exit codes: 0 ok, 2 config error, 3 infeasible optimization, 4 numerical
// failure.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "isaccoop/comp.hpp"
#include "isaccoop/harness.hpp"
#include "isaccoop/ranging.hpp"
#include "json.hpp"

namespace {

using isaccoop::BeamformingSolution;
using nlohmann::json;

json solution_to_json(const BeamformingSolution& sol) {
  json weights = json::array();
  for (const auto& w : sol.weights) {
    json station = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      station.push_back({{"re", w(i).real()}, {"im", w(i).imag()}});
    }
    weights.push_back(std::move(station));
  }
  return {
      {"weights", std::move(weights)},
      {"total_power_dbm", sol.total_power_dbm},
      {"feasible", sol.feasible},
      {"method", sol.method == isaccoop::BeamformingMethod::sdr ? "sdr" : "crlb_approx"},
      {"achieved_sinr_db", sol.achieved_sinr_db},
      {"achieved_crlb_m2", sol.achieved_crlb_m2},
      {"lower_bound_power_dbm", sol.lower_bound_power_dbm},
  };
}

int run_experiment_cmd(const std::string& preset_name, int trials, uint64_t seed,
                       bool seed_set, const std::string& out_csv, const std::string& out_svg,
                       int workers) {
  isaccoop::ExperimentSpec spec = isaccoop::preset(preset_name);
  if (trials > 0) spec.trials = trials;
  if (seed_set) spec.seed = seed;
  const auto records = isaccoop::run_experiment(spec, workers);
  if (out_csv.empty()) {
    std::cout << isaccoop::csv_string(records);
  } else {
    isaccoop::emit_csv(records, out_csv);
    std::cout << "wrote " << records.size() << " records to " << out_csv << "\n";
  }
  if (!out_svg.empty()) {
    isaccoop::emit_svg(records, out_svg, isaccoop::default_axes(preset_name));
    std::cout << "wrote chart to " << out_svg << "\n";
  }
  return 0;
}

int run_simulate_cmd(const std::string& config_path, const std::string& fusion, int trials,
                     uint64_t seed, const std::string& out_csv, int workers) {
  std::ifstream f(config_path);
  if (!f) throw isaccoop::IoError("cannot open '" + config_path + "'");
  json cfg;
  try {
    f >> cfg;
  } catch (const json::exception& e) {
    throw isaccoop::InvalidConfig(config_path, e.what());
  }

  isaccoop::ExperimentSpec spec;
  spec.name = "simulate";
  spec.kind = "simulate";
  spec.base_config = cfg;
  spec.base_config["fusion"] = fusion;
  spec.trials = trials;
  spec.seed = seed;
  spec.sweep = {{"/fusion", {fusion}}};  // the result rows carry the level tag
  const auto records = isaccoop::run_experiment(spec, workers);
  if (out_csv.empty()) {
    std::cout << isaccoop::csv_string(records);
  } else {
    isaccoop::emit_csv(records, out_csv);
  }
  return 0;
}

int run_crlb_cmd(double snr_db, int subcarriers, double bandwidth, int symbols,
                 double carrier) {
  isaccoop::OfdmConfig ofdm;
  ofdm.n_subcarriers = subcarriers;
  ofdm.n_symbols = symbols;
  ofdm.subcarrier_spacing = bandwidth / subcarriers;
  ofdm.carrier_frequency = carrier;

  isaccoop::EchoChannel channel;
  const double noise_variance = 1.0;
  channel.alpha = std::sqrt(isaccoop::db_to_linear(snr_db));
  channel.tau = 0.0;

  const isaccoop::CrlbReport report = isaccoop::crlb_range(channel, ofdm, noise_variance);
  json fim = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(report.fim(r, c));
    fim.push_back(std::move(row));
  }
  json out = {
      {"crlb_tau_s2", report.crlb_tau},
      {"crlb_range_m2", report.crlb_range},
      {"crlb_range_std_m", std::sqrt(report.crlb_range)},
      {"snr_linear", report.snr_linear},
      {"fim", std::move(fim)},
      {"config",
       {{"n_subcarriers", ofdm.n_subcarriers},
        {"n_symbols", ofdm.n_symbols},
        {"subcarrier_spacing_hz", ofdm.subcarrier_spacing},
        {"bandwidth_hz", ofdm.bandwidth()}}},
  };
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_optimize_cmd(double sinr_db, double crlb_bound, int stations, int antennas,
                     const std::string& method, uint64_t seed, bool json_out) {
  // Self-contained instance mirroring the power-minimization experiment.
  isaccoop::ExperimentSpec fig6 = isaccoop::preset("fig6");
  json cfg = fig6.base_config;
  cfg["sinr_target_db"] = sinr_db;
  cfg["crlb_bound_m2"] = crlb_bound;
  cfg["station_count"] = stations;
  if (antennas > 0) {
    for (auto& bs : cfg["scenario"]["base_stations"]) bs["antenna_count"] = antennas;
  }

  isaccoop::ScenarioConfig scfg = isaccoop::ScenarioConfig::from_json(cfg["scenario"]);
  const isaccoop::Scenario scenario = isaccoop::build_scenario(scfg);

  isaccoop::PowerMinSpec spec;
  spec.sinr_target_db = sinr_db;
  spec.crlb_bound_m2 = crlb_bound;
  for (int i = 0; i < stations; ++i) {
    spec.candidate_stations.push_back(scenario.base_stations[static_cast<size_t>(i)].id);
  }
  const auto& user = cfg["user"];
  spec.comm_user = {user[0].get<double>(), user[1].get<double>(), user[2].get<double>()};
  spec.sense_target = scenario.targets.front().position;

  isaccoop::PowerProblemOptions options;
  options.ofdm.n_subcarriers = cfg["ofdm"]["n_subcarriers"].get<int>();
  options.ofdm.n_symbols = cfg["ofdm"]["n_symbols"].get<int>();
  options.ofdm.subcarrier_spacing = cfg["ofdm"]["subcarrier_spacing_hz"].get<double>();
  options.ofdm.carrier_frequency = scenario.base_stations.front().carrier_frequency;
  options.comm_bandwidth_hz = cfg["comm_bandwidth_hz"].get<double>();
  options.comm_rician = isaccoop::RicianParams{cfg["rician_k_db"].get<double>()};

  isaccoop::RngStream rng = isaccoop::RngStream::from_keys({seed, 0xf16});
  const isaccoop::PowerMinProblem problem =
      isaccoop::build_power_problem(scenario, spec, options, rng);
  const BeamformingSolution sol = method == "sdr" ? isaccoop::min_power_sdr(problem)
                                                  : isaccoop::min_power_crlb_approx(problem);
  if (json_out) {
    std::cout << solution_to_json(sol).dump(2) << "\n";
  } else {
    std::cout << "method " << method << ": total power " << sol.total_power_dbm
              << " dBm (lower bound " << sol.lower_bound_power_dbm << " dBm), SINR "
              << sol.achieved_sinr_db << " dB, CRLB " << sol.achieved_crlb_m2 << " m^2\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative ISAC network simulator"};
  app.require_subcommand(1);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a named Monte-Carlo preset");
  std::string preset_name;
  int trials = 0;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_csv, out_svg;
  int workers = 1;
  exp->add_option("preset", preset_name, "preset name: fig5b, fig5c, fig5d, fig6")->required();
  exp->add_option("--trials", trials, "override the preset trial count");
  exp->add_option("--seed", seed, "override the preset seed")->each([&](const std::string&) {
    seed_set = true;
  });
  exp->add_option("--out", out_csv, "CSV output path (default: stdout)");
  exp->add_option("--svg", out_svg, "SVG chart output path");
  exp->add_option("--workers", workers, "worker thread count")->default_val(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo on a scenario JSON");
  std::string config_path;
  std::string fusion = "mid";
  int sim_trials = 200;
  uint64_t sim_seed = 1;
  std::string sim_csv;
  int sim_workers = 1;
  sim->add_option("--config", config_path, "scenario config JSON")->required();
  sim->add_option("--fusion", fusion, "fusion level: front|mid|back|symbol")
      ->check(CLI::IsMember({"front", "mid", "back", "symbol"}));
  sim->add_option("--trials", sim_trials, "trial count")->default_val(200);
  sim->add_option("--seed", sim_seed, "seed")->default_val(1);
  sim->add_option("--out", sim_csv, "CSV output path (default: stdout)");
  sim->add_option("--workers", sim_workers, "worker thread count")->default_val(1);

  // crlb
  auto* crlb = app.add_subcommand("crlb", "print a CRLB report as JSON");
  double snr_db = 20.0, bandwidth = 1e9, carrier = 0.34e12;
  int subcarriers = 64, symbols = 14;
  crlb->add_option("--snr-db", snr_db, "per-element SNR in dB")->default_val(20.0);
  crlb->add_option("--subcarriers", subcarriers, "subcarrier count")->default_val(64);
  crlb->add_option("--bandwidth", bandwidth, "bandwidth in Hz")->default_val(1e9);
  crlb->add_option("--symbols", symbols, "symbol count")->default_val(14);
  crlb->add_option("--carrier", carrier, "carrier frequency in Hz")->default_val(0.34e12);

  // optimize
  auto* opt = app.add_subcommand("optimize", "minimum-power cooperative beamforming");
  double opt_sinr = 10.0, opt_crlb = 0.03;
  int opt_stations = 2, opt_antennas = 0;
  std::string opt_method = "approx";
  uint64_t opt_seed = 1;
  bool opt_json = false;
  opt->add_option("--sinr-db", opt_sinr, "SINR target in dB")->default_val(10.0);
  opt->add_option("--crlb-bound", opt_crlb, "range CRLB bound in m^2")->default_val(0.03);
  opt->add_option("--stations", opt_stations, "cooperating station count (1-4)")
      ->check(CLI::Range(1, 4))
      ->default_val(2);
  opt->add_option("--antennas", opt_antennas, "antennas per station (default: preset)");
  opt->add_option("--method", opt_method, "solver: sdr|approx")
      ->check(CLI::IsMember({"sdr", "approx"}));
  opt->add_option("--seed", opt_seed, "channel realization seed")->default_val(1);
  opt->add_flag("--json", opt_json, "emit the solution as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (exp->parsed()) {
      return run_experiment_cmd(preset_name, trials, seed, seed_set, out_csv, out_svg, workers);
    }
    if (sim->parsed()) {
      return run_simulate_cmd(config_path, fusion, sim_trials, sim_seed, sim_csv, sim_workers);
    }
    if (crlb->parsed()) {
      return run_crlb_cmd(snr_db, subcarriers, bandwidth, symbols, carrier);
    }
    if (opt->parsed()) {
      return run_optimize_cmd(opt_sinr, opt_crlb, opt_stations, opt_antennas, opt_method,
                              opt_seed, opt_json);
    }
  } catch (const isaccoop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
