#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isaccoop/common.hpp"
#include "json.hpp"

namespace isaccoop {

enum class BandClass { low, high };

struct BaseStation {
  std::string id;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double carrier_frequency = 28e9;  // Hz
  double bandwidth = 95e6;          // Hz
  int antenna_count = 8;            // uniform linear array along world x
  double antenna_spacing = 0.0;     // meters; 0 resolves to half wavelength
  double max_power_dbm = 30.0;
  int rf_chain_count = 0;           // 0 resolves to antenna_count
  double clock_offset = 0.0;        // seconds

  BandClass band_class() const {
    return carrier_frequency >= kHighBandThresholdHz ? BandClass::high : BandClass::low;
  }
  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  double spacing() const { return antenna_spacing > 0.0 ? antenna_spacing : wavelength() / 2.0; }
  int rf_chains() const { return rf_chain_count > 0 ? rf_chain_count : antenna_count; }
};

/// Axis-aligned box; occlusion uses the 2-D footprint only.
struct Obstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 0.0;   // extent along x
  double depth = 0.0;   // extent along y
  double height = 0.0;

  bool contains_xy(double x, double y) const {
    return std::abs(x - center.x()) <= width / 2.0 && std::abs(y - center.y()) <= depth / 2.0;
  }
};

struct Target {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double rcs = 1.0;  // m^2
};

struct ObstacleFieldConfig {
  int count = 0;
  double min_size = 10.0;   // footprint edge, meters
  double max_size = 60.0;
  double min_height = 5.0;
  double max_height = 30.0;
};

struct ScenarioConfig {
  double area_width = 500.0;
  double area_depth = 500.0;
  uint64_t master_seed = 1;
  std::vector<BaseStation> base_stations;
  std::vector<Target> targets;
  std::vector<Obstacle> explicit_obstacles;  // used when sample_obstacle_field is false
  bool sample_obstacle_field = true;
  ObstacleFieldConfig obstacle_field;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;

  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Immutable world description; safe for concurrent reads once built.
struct Scenario {
  double area_width = 0.0;
  double area_depth = 0.0;
  std::vector<BaseStation> base_stations;
  std::vector<Obstacle> obstacles;
  std::vector<Target> targets;
  uint64_t master_seed = 0;

  const BaseStation& station(const std::string& id) const;
};

Scenario build_scenario(const ScenarioConfig& config);

/// True iff the open segment a->b clears every obstacle footprint.
/// The test is 2-D: heights are ignored.
bool is_los(const Scenario& scenario, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

std::vector<Obstacle> sample_obstacles(RngStream& rng, int count, double area_width,
                                       double area_depth, const ObstacleFieldConfig& sizes);

}  // namespace isaccoop
