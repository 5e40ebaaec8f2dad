#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace flexbid {

// Deterministic, platform-independent random numbers. std::mt19937 would be
// portable but the std:: distributions are not (implementations differ), so
// sampling is done with explicit algorithms on top of a xoshiro256++ core.

// SplitMix64 step; used for seeding and for hashing tag sequences into seeds.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform integer in [lo, hi] inclusive, by rejection (unbiased).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (both values used alternately).
  double normal(double mean, double sd);

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a master seed with a sequence of integer tags (run index, hour,
// purpose code, ...) into an independent stream seed. Deterministic and
// insensitive to the order in which streams are later consumed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

// k distinct indices drawn uniformly from {0, ..., n-1}, returned sorted.
// Floyd's algorithm; O(k) draws regardless of n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace flexbid
