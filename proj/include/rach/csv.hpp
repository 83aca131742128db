#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace rach::csv {

/// Shortest decimal that reads back to the same double. Integral values print without a fraction.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("csv: cannot format number");
  return std::string(buf.data(), res.ptr);
}

inline std::string number(std::int64_t v) { return std::to_string(v); }
inline std::string number(int v) { return std::to_string(v); }

/// Writes one comma-separated record followed by '\n'.
class RowWriter {
 public:
  explicit RowWriter(std::ostream& out) : out_(out) {}

  template <class T>
  RowWriter& operator<<(const T& field) {
    if (!first_) out_ << ',';
    first_ = false;
    if constexpr (std::is_convertible_v<const T&, std::string_view>) out_ << std::string_view(field);
    else out_ << number(field);
    return *this;
  }

  RowWriter& empty() {
    if (!first_) out_ << ',';
    first_ = false;
    return *this;
  }

  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace rach::csv
