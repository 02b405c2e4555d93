#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "fsel/error.hpp"

namespace fsel {

/// Fixed-width bit mask over the candidate features; the search-space element.
/// Bit i corresponds to feature index i. The text form writes feature 0 as the
/// leftmost character: {f0} with width 3 is "100".
class FeatureMask {
 public:
  FeatureMask() = default;

  explicit FeatureMask(int width) : width_(check_width(width)), blocks_(block_count(width), 0) {}

  static FeatureMask full(int width) {
    FeatureMask m(width);
    for (int i = 0; i < width; ++i) m.set(i);
    return m;
  }

  static FeatureMask of(int width, std::initializer_list<int> bits) {
    FeatureMask m(width);
    for (int b : bits) m.set(b);
    return m;
  }

  static FeatureMask of(int width, const std::vector<int>& bits) {
    FeatureMask m(width);
    for (int b : bits) m.set(b);
    return m;
  }

  static FeatureMask from_bitstring(std::string_view s) {
    FeatureMask m(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') {
        m.set(static_cast<int>(i));
      } else if (s[i] != '0') {
        throw ParseError("mask bitstring may contain only '0'/'1', got '" + std::string(s) + "'");
      }
    }
    return m;
  }

  /// Inverse of to_uint(); width must be <= 32.
  static FeatureMask from_uint(int width, std::uint32_t u) {
    FeatureMask m(width);
    for (int i = 0; i < width; ++i) {
      if (u & (1u << i)) m.set(i);
    }
    return m;
  }

  int width() const { return width_; }

  int count() const {
    int c = 0;
    for (std::uint64_t b : blocks_) c += static_cast<int>(popcount(b));
    return c;
  }

  bool none() const {
    for (std::uint64_t b : blocks_)
      if (b != 0) return false;
    return true;
  }

  bool test(int i) const {
    check_index(i);
    return (blocks_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
  }

  void set(int i, bool v = true) {
    check_index(i);
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (v)
      blocks_[static_cast<std::size_t>(i) >> 6] |= bit;
    else
      blocks_[static_cast<std::size_t>(i) >> 6] &= ~bit;
  }

  void reset(int i) { set(i, false); }

  FeatureMask with(int i) const {
    FeatureMask m = *this;
    m.set(i);
    return m;
  }

  FeatureMask without(int i) const {
    FeatureMask m = *this;
    m.reset(i);
    return m;
  }

  /// Set feature indices, ascending.
  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (int i = 0; i < width_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  /// Clear feature indices, ascending.
  std::vector<int> absent_indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(width_ - count()));
    for (int i = 0; i < width_; ++i)
      if (!test(i)) out.push_back(i);
    return out;
  }

  std::string bitstring() const {
    std::string s(static_cast<std::size_t>(width_), '0');
    for (int i = 0; i < width_; ++i)
      if (test(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  /// Packs the mask into a uint32 with bit i = feature i; width must be <= 32.
  std::uint32_t to_uint() const {
    if (width_ > 32) throw ValidationError("mask too wide for to_uint (width > 32)");
    return static_cast<std::uint32_t>(blocks_.empty() ? 0 : blocks_[0]);
  }

  bool operator==(const FeatureMask&) const = default;

 private:
  static int check_width(int width) {
    if (width < 0) throw ValidationError("mask width must be non-negative");
    return width;
  }

  void check_index(int i) const {
    if (i < 0 || i >= width_)
      throw ValidationError("feature index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(width_) + ")");
  }

  static std::size_t block_count(int width) {
    return (static_cast<std::size_t>(width) + 63) / 64;
  }

  static unsigned popcount(std::uint64_t v) {
    unsigned c = 0;
    while (v) {
      v &= v - 1;
      ++c;
    }
    return c;
  }

  int width_ = 0;
  std::vector<std::uint64_t> blocks_;
};

}  // namespace fsel
