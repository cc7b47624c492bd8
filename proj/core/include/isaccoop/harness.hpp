#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isaccoop/common.hpp"
#include "json.hpp"

namespace isaccoop {

struct SweepAxis {
  std::string pointer;  // JSON pointer into the base config, e.g. "/cooperating_stations"
  std::vector<nlohmann::json> values;

  std::string label() const {
    const auto pos = pointer.find_last_of('/');
    return pos == std::string::npos ? pointer : pointer.substr(pos + 1);
  }
};

struct ExperimentSpec {
  std::string name;
  std::string kind;  // trial-runner id: fig5b, fig5c, fig5d, fig6, simulate
  nlohmann::json base_config;
  int trials = 200;
  uint64_t seed = 1;
  std::vector<SweepAxis> sweep;
  std::vector<std::string> outputs;

  void validate() const;
};

struct ResultRecord {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> coordinates;  // sweep key -> value
  std::string metric;
  double value = 0.0;
  double standard_error = 0.0;
  int trials = 0;  // valid trials behind the value
};

/// Per-trial output: one sample per metric the trial produced.  Metrics a
/// trial could not produce are simply absent; `failed` marks the trial for
/// the failed-trial counter.
struct TrialOutcome {
  std::map<std::string, double> samples;
  bool failed = false;
};

using TrialRunner = std::function<TrialOutcome(const nlohmann::json& config, RngStream& rng)>;

/// Registered trial runner for an experiment kind (presets register theirs).
TrialRunner find_trial_runner(const std::string& kind);

/// Runs trials at every sweep point with RNG streams derived from
/// (seed, sweep index, trial index); deterministic for any worker count.
std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec, int workers = 1);

/// Named presets: fig5b, fig5c, fig5d, fig6.
ExperimentSpec preset(const std::string& name);
std::vector<std::string> preset_names();

/// CSV with columns experiment,<sweep keys>,metric,value,stderr,trials.
/// Byte-identical for identical records on any platform.
void emit_csv(const std::vector<ResultRecord>& records, const std::string& path);
std::string csv_string(const std::vector<ResultRecord>& records);

struct SvgAxes {
  std::string x_key;       // sweep key on the horizontal axis
  std::string metric;      // metric to plot
  bool log_y = false;
  std::string title;
};

/// Self-contained polyline SVG chart, one series per distinct combination of
/// the non-x sweep keys.
void emit_svg(const std::vector<ResultRecord>& records, const std::string& path,
              const SvgAxes& axes);

/// Default chart axes for a preset's headline metric.
SvgAxes default_axes(const std::string& preset_name);

}  // namespace isaccoop
