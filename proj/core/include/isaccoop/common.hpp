#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace isaccoop {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Carrier frequencies at or above this threshold count as the high band.
inline constexpr double kHighBandThresholdHz = 24e9;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// ---------------------------------------------------------------------------
// Errors.  The CLI maps categories to exit codes (2 config, 3 infeasible,
// 4 numerical), so every thrown condition carries its category.
// ---------------------------------------------------------------------------

enum class ErrorKind { config = 2, infeasible = 3, numerical = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};
struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

struct InvalidConfig : ConfigError {
  InvalidConfig(const std::string& field_path, const std::string& what)
      : ConfigError(field_path + ": " + what), field(field_path) {}
  std::string field;
};

struct DegenerateSegment : ConfigError {
  DegenerateSegment() : ConfigError("line-of-sight query with coincident endpoints") {}
};
struct DistanceBelowReference : ConfigError {
  explicit DistanceBelowReference(const std::string& what) : ConfigError(what) {}
};
struct NonPositiveBandwidth : ConfigError {
  NonPositiveBandwidth() : ConfigError("bandwidth must be positive") {}
};
struct TargetCoincidesWithStation : ConfigError {
  TargetCoincidesWithStation() : ConfigError("target position coincides with a station") {}
};
struct EmptyFrame : ConfigError {
  EmptyFrame() : ConfigError("echo frame has no resource elements") {}
};
struct SingleSymbolFrame : ConfigError {
  SingleSymbolFrame() : ConfigError("Doppler estimation needs at least two symbols") {}
};
struct InsufficientAntennas : ConfigError {
  InsufficientAntennas() : ConfigError("angle estimation needs at least two antennas") {}
};
struct CandidateSetEmpty : ConfigError {
  CandidateSetEmpty() : ConfigError("refinement candidate set is empty") {}
};
struct ConfigMismatch : ConfigError {
  explicit ConfigMismatch(const std::string& what) : ConfigError(what) {}
};
struct GridMismatch : ConfigError {
  GridMismatch() : ConfigError("delay profiles are not on a common grid") {}
};
struct CollinearGeometry : ConfigError {
  CollinearGeometry() : ConfigError("receiver geometry is rank deficient") {}
};
struct UnknownPreset : ConfigError {
  explicit UnknownPreset(const std::string& name) : ConfigError("unknown preset: " + name) {}
};
struct IoError : ConfigError {
  explicit IoError(const std::string& what) : ConfigError(what) {}
};

struct SingularFim : NumericalError {
  explicit SingularFim(const std::string& what) : NumericalError(what) {}
};
struct NoConvergence : NumericalError {
  explicit NoConvergence(const std::string& what) : NumericalError(what) {}
};
struct MaxIterations : NumericalError {
  explicit MaxIterations(const std::string& what) : NumericalError(what) {}
};
struct SolverFailure : NumericalError {
  explicit SolverFailure(const std::string& what) : NumericalError(what) {}
};
struct DestructiveCombining : NumericalError {
  DestructiveCombining() : NumericalError("coherent combining lowered the SNR below the best input") {}
};
struct ReferencePathNotDetected : NumericalError {
  ReferencePathNotDetected() : NumericalError("reference path peak below detection threshold") {}
};

struct Infeasible : InfeasibleError {
  explicit Infeasible(const std::string& binding) : InfeasibleError("infeasible: " + binding) {}
};
struct AllFixesRejected : InfeasibleError {
  AllFixesRejected() : InfeasibleError("outlier rejection discarded every local fix") {}
};
struct NoFeasibleSubset : InfeasibleError {
  NoFeasibleSubset() : InfeasibleError("no candidate subset satisfies the constraints") {}
};

// ---------------------------------------------------------------------------
// Deterministic splittable RNG streams.  Substreams are derived from the
// stream key, never from consumption state, so parallel trials that derive
// their streams from (seed, sweep index, trial index) are reproducible
// regardless of scheduling.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t mix_keys(uint64_t a, uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x9E3779B97F4A7C15ull));
}

class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key), gen_(splitmix64(key)) {}

  static RngStream from_keys(std::initializer_list<uint64_t> keys) {
    uint64_t k = 0x243F6A8885A308D3ull;  // arbitrary fixed origin
    for (uint64_t v : keys) k = mix_keys(k, v);
    return RngStream(k);
  }

  /// Independent child stream; a pure function of (this stream's key, key).
  RngStream substream(uint64_t key) const { return RngStream(mix_keys(key_, key)); }

  uint64_t key() const { return key_; }

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (keeps the implementation portable;
  /// std::normal_distribution is not specified bit-exactly).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// Circular complex Gaussian with unit power: E|g|^2 = 1.
  cdouble cnormal() {
    return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)};
  }

 private:
  uint64_t key_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace isaccoop
