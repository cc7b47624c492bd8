#include "isaccoop/harness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace isaccoop {

namespace {

enum class MetricKind { rmse, mean, probability };

MetricKind metric_kind(const std::string& name) {
  if (name.rfind("rmse", 0) == 0) return MetricKind::rmse;
  if (name.find("probability") != std::string::npos) return MetricKind::probability;
  return MetricKind::mean;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidConfig("trials", "must be >= 1");
  if (name.empty()) throw InvalidConfig("name", "must be non-empty");
  for (const auto& axis : sweep) {
    if (axis.values.empty()) throw InvalidConfig("sweep." + axis.label(), "no values");
    const nlohmann::json::json_pointer ptr(axis.pointer);
    if (!base_config.contains(ptr)) {
      throw InvalidConfig("sweep." + axis.label(),
                          "pointer '" + axis.pointer + "' does not resolve against the config");
    }
  }
  find_trial_runner(kind);  // throws on unknown kinds
}

std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec, int workers) {
  spec.validate();
  const TrialRunner runner = find_trial_runner(spec.kind);

  // Materialize the sweep grid (cartesian product, first axis slowest).
  struct Point {
    nlohmann::json config;
    std::vector<std::pair<std::string, std::string>> coordinates;
  };
  std::vector<Point> points;
  size_t grid = 1;
  for (const auto& axis : spec.sweep) grid *= axis.values.size();
  points.reserve(grid);
  for (size_t flat = 0; flat < grid; ++flat) {
    Point p;
    p.config = spec.base_config;
    size_t rest = flat;
    for (size_t a = spec.sweep.size(); a-- > 0;) {
      const auto& axis = spec.sweep[a];
      const size_t idx = rest % axis.values.size();
      rest /= axis.values.size();
      p.config[nlohmann::json::json_pointer(axis.pointer)] = axis.values[idx];
    }
    // Coordinates in axis order for stable CSV columns.
    size_t div = grid;
    for (const auto& axis : spec.sweep) {
      div /= axis.values.size();
      const size_t idx = (flat / div) % axis.values.size();
      const auto& v = axis.values[idx];
      p.coordinates.emplace_back(axis.label(),
                                 v.is_string() ? v.get<std::string>() : v.dump());
    }
    points.push_back(std::move(p));
  }

  // Flat job list; every trial writes its own slot, so scheduling cannot
  // change the result.
  const size_t n_trials = static_cast<size_t>(spec.trials);
  std::vector<TrialOutcome> slots(points.size() * n_trials);
  std::atomic<size_t> cursor{0};
  std::atomic<bool> aborted{false};
  std::string abort_message;
  std::mutex abort_mutex;

  auto work = [&]() {
    while (!aborted.load(std::memory_order_relaxed)) {
      const size_t job = cursor.fetch_add(1, std::memory_order_relaxed);
      if (job >= slots.size()) return;
      const size_t point = job / n_trials;
      const size_t trial = job % n_trials;
      RngStream rng = RngStream::from_keys({spec.seed, point, trial});
      try {
        slots[job] = runner(points[point].config, rng);
      } catch (const ConfigError& e) {
        {
          std::lock_guard<std::mutex> lock(abort_mutex);
          abort_message = e.what();
        }
        aborted.store(true, std::memory_order_relaxed);
        return;
      } catch (const Error&) {
        slots[job].failed = true;  // per-trial numerical/infeasible failures
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(slots.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (aborted.load()) throw InvalidConfig("experiment", abort_message);

  // Order-fixed aggregation.
  std::vector<ResultRecord> records;
  for (size_t point = 0; point < points.size(); ++point) {
    std::map<std::string, std::vector<double>> samples;
    int failed = 0;
    for (size_t trial = 0; trial < n_trials; ++trial) {
      const TrialOutcome& out = slots[point * n_trials + trial];
      if (out.failed) ++failed;
      for (const auto& [metric, value] : out.samples) samples[metric].push_back(value);
    }

    const std::vector<std::string>* metric_order = &spec.outputs;
    std::vector<std::string> discovered;
    if (metric_order->empty()) {
      for (const auto& [metric, _] : samples) discovered.push_back(metric);
      metric_order = &discovered;
    }

    for (const auto& metric : *metric_order) {
      auto it = samples.find(metric);
      ResultRecord rec;
      rec.experiment = spec.name;
      rec.coordinates = points[point].coordinates;
      rec.metric = metric;
      if (it == samples.end() || it->second.empty()) {
        rec.value = std::numeric_limits<double>::quiet_NaN();
        rec.standard_error = std::numeric_limits<double>::quiet_NaN();
        rec.trials = 0;
        records.push_back(std::move(rec));
        continue;
      }
      const auto& v = it->second;
      const double n = static_cast<double>(v.size());
      rec.trials = static_cast<int>(v.size());
      switch (metric_kind(metric)) {
        case MetricKind::rmse: {
          double sq = 0.0;
          for (double e : v) sq += e * e;
          const double mean_sq = sq / n;
          rec.value = std::sqrt(mean_sq);
          double var_sq = 0.0;
          for (double e : v) var_sq += (e * e - mean_sq) * (e * e - mean_sq);
          var_sq /= std::max(1.0, n - 1.0);
          // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
          rec.standard_error =
              rec.value > 0.0 ? std::sqrt(var_sq / n) / (2.0 * rec.value) : 0.0;
          break;
        }
        case MetricKind::probability: {
          double p = 0.0;
          for (double e : v) p += e;
          p /= n;
          rec.value = p;
          rec.standard_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
          break;
        }
        case MetricKind::mean: {
          double mean = 0.0;
          for (double e : v) mean += e;
          mean /= n;
          double var = 0.0;
          for (double e : v) var += (e - mean) * (e - mean);
          var /= std::max(1.0, n - 1.0);
          rec.value = mean;
          rec.standard_error = std::sqrt(var / n);
          break;
        }
      }
      records.push_back(std::move(rec));
    }

    ResultRecord fail_rec;
    fail_rec.experiment = spec.name;
    fail_rec.coordinates = points[point].coordinates;
    fail_rec.metric = "failed_trials";
    fail_rec.value = static_cast<double>(failed);
    fail_rec.standard_error = 0.0;
    fail_rec.trials = spec.trials;
    records.push_back(std::move(fail_rec));
  }
  return records;
}

}  // namespace isaccoop
