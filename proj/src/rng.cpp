#include "helm/rng.hpp"

#include <cmath>

#include "helm/core.hpp"

namespace helm {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng Rng::stream(std::uint64_t seed, std::string_view label) {
  return Rng(mix64(mix64(seed) ^ hash_label(label)));
}

Rng Rng::split(std::string_view label) const {
  return Rng(mix64(key_ ^ hash_label(label)) + 0x9e3779b97f4a7c15ULL);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t x = key_ + (counter_ + 1) * 0x9e3779b97f4a7c15ULL;
  ++counter_;
  return mix64(x);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  const double u1 = 1.0 - uniform(); // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace helm
