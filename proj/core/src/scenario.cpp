#include "isaccoop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace isaccoop {

namespace {

constexpr uint64_t kObstacleStreamSalt = 0x0b57ac1eull;

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvalidConfig(field, what);
}

bool inside_area(const Eigen::Vector3d& p, double w, double d) {
  return p.x() >= 0.0 && p.x() <= w && p.y() >= 0.0 && p.y() <= d;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(area_width > 0.0, "area.width", "must be positive");
  require(area_depth > 0.0, "area.depth", "must be positive");
  require(!base_stations.empty(), "base_stations", "at least one base station required");

  std::set<std::string> ids;
  for (size_t i = 0; i < base_stations.size(); ++i) {
    const auto& bs = base_stations[i];
    const std::string path = "base_stations[" + std::to_string(i) + "]";
    require(!bs.id.empty(), path + ".id", "must be non-empty");
    require(ids.insert(bs.id).second, path + ".id", "duplicate identifier '" + bs.id + "'");
    require(inside_area(bs.position, area_width, area_depth), path + ".position",
            "outside the area");
    require(bs.carrier_frequency > 0.0, path + ".carrier_frequency", "must be positive");
    require(bs.bandwidth > 0.0, path + ".bandwidth", "must be positive");
    require(bs.bandwidth < bs.carrier_frequency, path + ".bandwidth",
            "must be below the carrier frequency");
    require(bs.antenna_count >= 1, path + ".antenna_count", "must be >= 1");
    require(bs.antenna_spacing >= 0.0, path + ".antenna_spacing", "must be >= 0");
    require(bs.rf_chain_count >= 0, path + ".rf_chain_count", "must be >= 0");
    require(bs.rf_chains() <= bs.antenna_count, path + ".rf_chain_count",
            "must not exceed antenna_count");
  }

  for (size_t i = 0; i < targets.size(); ++i) {
    const std::string path = "targets[" + std::to_string(i) + "]";
    require(inside_area(targets[i].position, area_width, area_depth), path + ".position",
            "outside the area");
    require(targets[i].rcs > 0.0, path + ".rcs", "must be positive");
  }

  if (sample_obstacle_field) {
    require(obstacle_field.count >= 0, "obstacles.count", "must be >= 0");
    require(obstacle_field.min_size > 0.0, "obstacles.min_size", "must be positive");
    require(obstacle_field.max_size >= obstacle_field.min_size, "obstacles.max_size",
            "must be >= min_size");
    require(obstacle_field.min_height > 0.0, "obstacles.min_height", "must be positive");
    require(obstacle_field.max_height >= obstacle_field.min_height, "obstacles.max_height",
            "must be >= min_height");
  } else {
    for (size_t i = 0; i < explicit_obstacles.size(); ++i) {
      const auto& o = explicit_obstacles[i];
      const std::string path = "obstacles[" + std::to_string(i) + "]";
      require(o.width > 0.0, path + ".width", "must be positive");
      require(o.depth > 0.0, path + ".depth", "must be positive");
      require(o.height > 0.0, path + ".height", "must be positive");
    }
  }
}

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw InvalidConfig(field, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    if (j.contains("area")) {
      cfg.area_width = j["area"].value("width", cfg.area_width);
      cfg.area_depth = j["area"].value("depth", cfg.area_depth);
    }
    cfg.master_seed = j.value("master_seed", cfg.master_seed);

    for (const auto& b : j.value("base_stations", nlohmann::json::array())) {
      BaseStation bs;
      bs.id = b.value("id", "");
      bs.position = vec3_from_json(b.at("position"), "base_stations.position");
      bs.carrier_frequency = b.at("carrier_frequency_hz").get<double>();
      bs.bandwidth = b.at("bandwidth_hz").get<double>();
      bs.antenna_count = b.value("antenna_count", 8);
      bs.antenna_spacing = b.value("antenna_spacing_m", 0.0);
      bs.max_power_dbm = b.value("max_power_dbm", 30.0);
      bs.rf_chain_count = b.value("rf_chain_count", 0);
      bs.clock_offset = b.value("clock_offset_s", 0.0);
      cfg.base_stations.push_back(std::move(bs));
    }

    for (const auto& t : j.value("targets", nlohmann::json::array())) {
      Target tg;
      tg.position = vec3_from_json(t.at("position"), "targets.position");
      if (t.contains("velocity")) tg.velocity = vec3_from_json(t["velocity"], "targets.velocity");
      tg.rcs = t.value("rcs_m2", 1.0);
      cfg.targets.push_back(tg);
    }

    if (j.contains("obstacles")) {
      const auto& obs = j["obstacles"];
      if (obs.is_array()) {
        cfg.sample_obstacle_field = false;
        for (const auto& o : obs) {
          Obstacle box;
          box.center = {o.at("center")[0].get<double>(), o.at("center")[1].get<double>()};
          box.width = o.at("width").get<double>();
          box.depth = o.at("depth").get<double>();
          box.height = o.value("height", 10.0);
          cfg.explicit_obstacles.push_back(box);
        }
      } else {
        cfg.sample_obstacle_field = true;
        cfg.obstacle_field.count = obs.value("count", 0);
        cfg.obstacle_field.min_size = obs.value("min_size_m", 10.0);
        cfg.obstacle_field.max_size = obs.value("max_size_m", 60.0);
        cfg.obstacle_field.min_height = obs.value("min_height_m", 5.0);
        cfg.obstacle_field.max_height = obs.value("max_height_m", 30.0);
      }
    } else {
      cfg.sample_obstacle_field = true;
      cfg.obstacle_field.count = 0;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("scenario", std::string("malformed JSON: ") + e.what());
  }
  return cfg;
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["area"] = {{"width", area_width}, {"depth", area_depth}};
  j["master_seed"] = master_seed;
  j["base_stations"] = nlohmann::json::array();
  for (const auto& bs : base_stations) {
    j["base_stations"].push_back({
        {"id", bs.id},
        {"position", {bs.position.x(), bs.position.y(), bs.position.z()}},
        {"carrier_frequency_hz", bs.carrier_frequency},
        {"bandwidth_hz", bs.bandwidth},
        {"antenna_count", bs.antenna_count},
        {"antenna_spacing_m", bs.antenna_spacing},
        {"max_power_dbm", bs.max_power_dbm},
        {"rf_chain_count", bs.rf_chain_count},
        {"clock_offset_s", bs.clock_offset},
    });
  }
  j["targets"] = nlohmann::json::array();
  for (const auto& t : targets) {
    j["targets"].push_back({
        {"position", {t.position.x(), t.position.y(), t.position.z()}},
        {"velocity", {t.velocity.x(), t.velocity.y(), t.velocity.z()}},
        {"rcs_m2", t.rcs},
    });
  }
  if (sample_obstacle_field) {
    j["obstacles"] = {
        {"count", obstacle_field.count},
        {"min_size_m", obstacle_field.min_size},
        {"max_size_m", obstacle_field.max_size},
        {"min_height_m", obstacle_field.min_height},
        {"max_height_m", obstacle_field.max_height},
    };
  } else {
    j["obstacles"] = nlohmann::json::array();
    for (const auto& o : explicit_obstacles) {
      j["obstacles"].push_back({
          {"center", {o.center.x(), o.center.y()}},
          {"width", o.width},
          {"depth", o.depth},
          {"height", o.height},
      });
    }
  }
  return j;
}

const BaseStation& Scenario::station(const std::string& id) const {
  for (const auto& bs : base_stations) {
    if (bs.id == id) return bs;
  }
  throw InvalidConfig("station", "unknown base station id '" + id + "'");
}

std::vector<Obstacle> sample_obstacles(RngStream& rng, int count, double area_width,
                                       double area_depth, const ObstacleFieldConfig& sizes) {
  if (count < 0) throw InvalidConfig("obstacles.count", "must be >= 0");
  std::vector<Obstacle> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Obstacle o;
    o.width = rng.uniform(sizes.min_size, sizes.max_size);
    o.depth = rng.uniform(sizes.min_size, sizes.max_size);
    o.height = rng.uniform(sizes.min_height, sizes.max_height);
    // Keep the footprint fully inside the area.
    o.center.x() = rng.uniform(o.width / 2.0, area_width - o.width / 2.0);
    o.center.y() = rng.uniform(o.depth / 2.0, area_depth - o.depth / 2.0);
    out.push_back(o);
  }
  return out;
}

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.area_width = config.area_width;
  s.area_depth = config.area_depth;
  s.base_stations = config.base_stations;
  s.targets = config.targets;
  s.master_seed = config.master_seed;
  if (config.sample_obstacle_field) {
    RngStream stream = RngStream::from_keys({config.master_seed, kObstacleStreamSalt});
    s.obstacles = sample_obstacles(stream, config.obstacle_field.count, s.area_width,
                                   s.area_depth, config.obstacle_field);
  } else {
    s.obstacles = config.explicit_obstacles;
  }
  return s;
}

namespace {

/// Open-segment vs closed-box overlap via the slab method.
bool segment_hits_box(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Obstacle& o) {
  const double hx = o.width / 2.0;
  const double hy = o.depth / 2.0;
  const Eigen::Vector2d d = b - a;

  double tmin = 0.0;
  double tmax = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = o.center[axis] - (axis == 0 ? hx : hy);
    const double hi = o.center[axis] + (axis == 0 ? hx : hy);
    if (std::abs(d[axis]) < 1e-15) {
      if (a[axis] < lo || a[axis] > hi) return false;
    } else {
      double t1 = (lo - a[axis]) / d[axis];
      double t2 = (hi - a[axis]) / d[axis];
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
      if (tmin > tmax) return false;
    }
  }
  // Exclude contact confined to the segment endpoints (open segment).
  return tmax > 0.0 && tmin < 1.0;
}

}  // namespace

bool is_los(const Scenario& scenario, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if ((a - b).norm() == 0.0) throw DegenerateSegment();
  const Eigen::Vector2d a2 = a.head<2>();
  const Eigen::Vector2d b2 = b.head<2>();
  for (const auto& o : scenario.obstacles) {
    if (segment_hits_box(a2, b2, o)) return false;
  }
  return true;
}

}  // namespace isaccoop
