#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace rach {

/// Raised when a model function is evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The argument lies below the Lambert W branch point, so no real solution exists.
class NoRealSolution : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A configuration value is out of range. `key()` names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)), reason_(what) {}

  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

/// Static channel parameters shared by the model, optimizer and simulator.
struct RachConfig {
  int n_preambles = 64;  // preambles per RACH subframe
  int n_s_min = 2;       // default LTE allocation
  int n_s_max = 8;
  double alpha = 25.0;   // price of one RACH subframe, in devices

  /// Throws ConfigError naming the first violated field.
  void validate() const {
    if (n_preambles < 1) throw ConfigError("channel.preambles", "must be >= 1");
    if (n_s_min < 1) throw ConfigError("channel.ns_min", "must be >= 1");
    if (n_s_max > 10) throw ConfigError("channel.ns_max", "a frame has only 10 subframes");
    if (n_s_min > n_s_max) throw ConfigError("channel.ns_max", "must be >= ns_min");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("channel.alpha", "must be finite and >= 0");
  }

  /// Number of (subframe, preamble) access opportunities in a frame with `n_s` RACH subframes.
  double opportunities(int n_s) const { return static_cast<double>(n_s) * n_preambles; }

  bool operator==(const RachConfig&) const = default;
};

/// Contending devices per frame. Real-valued so that estimates and expectations fit.
class Load {
 public:
  constexpr Load() = default;
  explicit Load(double n_devices) : n_devices_(n_devices) {
    if (!(n_devices >= 0.0)) throw DomainError("load must be a nonnegative number");
  }
  constexpr double devices() const { return n_devices_; }

 private:
  double n_devices_ = 0.0;
};

/// Successful devices per frame.
class Throughput {
 public:
  constexpr Throughput() = default;
  explicit Throughput(double value) : value_(value) {
    if (!(value >= 0.0)) throw DomainError("throughput must be a nonnegative number");
  }
  constexpr double value() const { return value_; }

 private:
  double value_ = 0.0;
};

/// Throughput net of the subframe cost; may be negative.
struct Utility {
  double value = 0.0;
};

}  // namespace rach
