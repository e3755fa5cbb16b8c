#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lsfsac {

// Deterministic counter-based generator (splitmix64 core). Hand-rolled so that
// streams are reproducible across standard-library implementations.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // Derive an independent stream for a named role.
  static Rng derive(uint64_t seed, const std::string& role);
  Rng split(const std::string& role) const;

  uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // standard normal, Box-Muller
  int randint(int n);                     // uniform in [0, n)
  // index sampled from unnormalized non-negative weights
  int categorical(const std::vector<double>& w);

private:
  uint64_t state_;
};

uint64_t splitmix64(uint64_t x);
uint64_t hash_str(const std::string& s);

}  // namespace lsfsac
