#include "lsfsac/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsfsac {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t hash_str(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng Rng::derive(uint64_t seed, const std::string& role) {
  return Rng(splitmix64(seed ^ hash_str(role)));
}

Rng Rng::split(const std::string& role) const {
  return Rng(splitmix64(state_ ^ hash_str(role)));
}

uint64_t Rng::next_u64() {
  state_ = splitmix64(state_);
  return state_;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::randint(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::randint: n must be positive");
  return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
}

int Rng::categorical(const std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) {
    if (x < 0.0) throw std::invalid_argument("Rng::categorical: negative weight");
    total += x;
  }
  if (total <= 0.0) throw std::invalid_argument("Rng::categorical: all-zero weights");
  double r = uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace lsfsac
