#pragma once

#include <cstdint>
#include <string_view>

namespace helm {

// Counter-based generator: output k of a stream is a pure function of
// (key, k). Streams are derived from a scenario seed by a fixed label, so
// adding a sensor never shifts the draws of another one.
//
// Gaussian draws use Box-Muller on two fresh uniforms with no cached spare,
// which keeps every draw a function of the counter alone.
class Rng {
public:
  explicit Rng(std::uint64_t key = 0) : key_(key) {}

  static Rng stream(std::uint64_t seed, std::string_view label);

  /// Child stream; the parent is not advanced.
  Rng split(std::string_view label) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double gaussian();
  double gaussian(double sigma) { return sigma == 0.0 ? 0.0 : sigma * gaussian(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

/// Seed for the i-th member of a batch; used by sweeps.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace helm
