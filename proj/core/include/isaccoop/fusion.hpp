#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "isaccoop/common.hpp"
#include "isaccoop/ranging.hpp"
#include "isaccoop/scenario.hpp"
#include "isaccoop/signal.hpp"

namespace isaccoop {

enum class FusionLevel { front, mid, back };

struct PositionEstimate {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  std::vector<std::string> contributing_nodes;
  FusionLevel fusion_level = FusionLevel::mid;
  bool degenerate_geometry = false;  // fewer than three receivers
};

// ---------------------------------------------------------------------------
// Front-end: coherent combination of raw frames.
// ---------------------------------------------------------------------------

struct FrontendResult {
  RangeEstimate estimate;  // relative to the first frame's geometry
  double fused_snr_db = 0.0;
  std::vector<double> input_snr_db;
};

/// Phase/delay-aligns every frame to the first one using the ground-truth
/// channels stored in the frames, coherently sums, and ranges the sum.
/// Throws DestructiveCombining when the fused SNR falls clearly below the
/// best input (the postcondition check).
FrontendResult frontend_fuse(const std::vector<EchoFrame>& frames,
                             const RefineParams& refine = {});

// ---------------------------------------------------------------------------
// Mid-end: weighted nonlinear least squares on extracted range features.
// ---------------------------------------------------------------------------

struct RangeObservation {
  Eigen::Vector2d rx_position = Eigen::Vector2d::Zero();
  double range = 0.0;     // meters
  double variance = 0.0;  // m^2
  std::string station;
};

struct PositionPrior {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  double stddev = 1.0;  // meters, isotropic
};

/// Gauss-Newton multilateration, initialized at the inverse-variance weighted
/// centroid unless an init is given.  Two receivers are accepted only with a
/// prior or an explicit init and come back flagged degenerate.
PositionEstimate midend_fuse(const std::vector<RangeObservation>& observations,
                             std::optional<Eigen::Vector2d> init = {},
                             std::optional<PositionPrior> prior = {});

// ---------------------------------------------------------------------------
// Back-end: robust weighted averaging of per-node local fixes.
// ---------------------------------------------------------------------------

/// Discards fixes farther than median + 3*MAD from the componentwise median,
/// then inverse-covariance averages the survivors.
PositionEstimate backend_fuse(const std::vector<PositionEstimate>& local_fixes);

/// Local position fix from one node's own range and angle estimate.
PositionEstimate local_fix_from_range_aoa(const BaseStation& station,
                                          const RangeEstimate& range, double aoa_rad,
                                          double aoa_variance);

// ---------------------------------------------------------------------------
// Symbol-level fusion: phase-calibrated accumulation of delay profiles.
// ---------------------------------------------------------------------------

/// Rotates each profile by its calibration phase and accumulates.
DelayProfile symbol_level_fuse(const std::vector<DelayProfile>& profiles,
                               const std::vector<double>& reference_phases);

/// Calibration phases against the reference node's strongest bin.
std::vector<double> calibration_phases(const std::vector<DelayProfile>& profiles,
                                       size_t reference_node);

/// Index of the profile with the strongest peak (the natural reference).
size_t strongest_profile(const std::vector<DelayProfile>& profiles);

/// Peak of a (possibly fused) profile converted to monostatic range.
double profile_peak_range(const DelayProfile& profile);

// ---------------------------------------------------------------------------
// Synchronization.
// ---------------------------------------------------------------------------

/// Shifts the frame's observed delays by `offset_s` (receiver clock error);
/// indistinguishable from a delay shift of every channel.
EchoFrame apply_clock_offset(const EchoFrame& frame, double offset_s);

struct TdoaParams {
  double search_window_s = 50e-9;      // around the geometric reference delay
  double detection_threshold_db = 13.0;
  int pad_factor = 8;
  int lattice_exponent = 6;
  bool subtract_reference = true;
};

struct TdoaResult {
  EchoFrame frame;               // calibrated (and reference-cancelled) copy
  double estimated_offset_s = 0.0;
};

/// Estimates the clock offset as (measured reference-path delay - geometric
/// reference delay) and removes it from the frame.
TdoaResult tdoa_calibrate(const EchoFrame& frame, double reference_path_delay_s,
                          const TdoaParams& params = {});

}  // namespace isaccoop
