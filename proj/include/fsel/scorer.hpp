#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <utility>

#include "fsel/error.hpp"
#include "fsel/mask.hpp"

namespace fsel {

/// Maps a feature subset to a usefulness score in [0,1]. Deterministic for a
/// fixed instance; calls() counts logical evaluations (memoized repeats still
/// count). Implementations must tolerate concurrent score() calls.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const FeatureMask& mask) = 0;
  virtual int width() const = 0;
  virtual std::uint64_t calls() const = 0;
};

/// Scorer backed by an arbitrary function; used by the exact-oracle command
/// and for injecting closed-form score functions into searches.
class FunctionScorer final : public Scorer {
 public:
  FunctionScorer(int width, std::function<double(const FeatureMask&)> fn)
      : width_(width), fn_(std::move(fn)) {
    if (width_ < 1) throw ValidationError("scorer width must be positive");
  }

  double score(const FeatureMask& mask) override {
    if (mask.width() != width_) throw ValidationError("mask width does not match scorer width");
    calls_.fetch_add(1, std::memory_order_relaxed);
    return fn_(mask);
  }

  int width() const override { return width_; }
  std::uint64_t calls() const override { return calls_.load(std::memory_order_relaxed); }

 private:
  int width_;
  std::function<double(const FeatureMask&)> fn_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace fsel
