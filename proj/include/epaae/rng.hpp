#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace epaae {

// Deterministic random stream. mt19937_64 is fully specified by the
// standard; the value transforms below are our own, so identical seeds
// give identical draws on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unbiased integer in [0, n)
  uint64_t below(uint64_t n) {
    uint64_t bound = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      uint64_t v = eng_();
      if (v >= bound) return v % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  uint64_t next_u64() { return eng_(); }

  // Independent child stream.
  Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace epaae
