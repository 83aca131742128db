#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rach/types.hpp"

namespace rach {

/// Piecewise-linear mean arrival rate (devices per frame). A segment covers
/// frames [start_frame, end_frame) and ramps from rate_start toward rate_end.
class LoadProfile {
 public:
  struct Segment {
    int start_frame;
    int end_frame;
    double rate_start;
    double rate_end;
    bool operator==(const Segment&) const = default;
  };

  LoadProfile() = default;

  explicit LoadProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ConfigError("load.segments", "required");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      if (s.end_frame <= s.start_frame)
        throw ConfigError("load.segments", "segment " + std::to_string(i) + " has end <= start");
      if (!(s.rate_start >= 0.0) || !(s.rate_end >= 0.0) || !std::isfinite(s.rate_start) ||
          !std::isfinite(s.rate_end))
        throw ConfigError("load.segments", "segment " + std::to_string(i) + " has a negative rate");
      if (i > 0 && s.start_frame != segments_[i - 1].end_frame)
        throw ConfigError("load.segments", "segment " + std::to_string(i) + " is not contiguous");
    }
  }

  /// A constant rate over `frames` frames.
  static LoadProfile constant(double rate, int frames) { return LoadProfile({{0, frames, rate, rate}}); }

  /// Linear ramp 0 -> peak over [0, half) and peak -> 0 over [half, 2 half).
  static LoadProfile triangular(double peak, int half) {
    return LoadProfile({{0, half, 0.0, peak}, {half, 2 * half, peak, 0.0}});
  }

  const std::vector<Segment>& segments() const { return segments_; }
  int first_frame() const { return segments_.front().start_frame; }
  int end_frame() const { return segments_.back().end_frame; }
  bool contains(int frame) const { return !segments_.empty() && frame >= first_frame() && frame < end_frame(); }

  double rate_at(int frame) const {
    for (const Segment& s : segments_) {
      if (frame >= s.start_frame && frame < s.end_frame) {
        const double t = static_cast<double>(frame - s.start_frame) / (s.end_frame - s.start_frame);
        return s.rate_start + (s.rate_end - s.rate_start) * t;
      }
    }
    throw DomainError("frame " + std::to_string(frame) + " is outside the load profile");
  }

  bool operator==(const LoadProfile&) const = default;

 private:
  std::vector<Segment> segments_;
};

/// Poisson draw with the profile's mean rate at `frame`.
template <class Rng>
std::int64_t generate_arrivals(const LoadProfile& profile, int frame, Rng& rng) {
  const double mean = profile.rate_at(frame);
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

}  // namespace rach
