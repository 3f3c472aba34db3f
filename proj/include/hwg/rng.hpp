#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace hwg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream derivation: streams for distinct (master, index,
// purpose) triples are decorrelated, so replicate workers never share state.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index,
                                   std::uint64_t purpose = 0) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= index * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  s ^= purpose * 0xda942042e4dd58b5ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x165667b19e3779f9ULL) ^ (c << 1);
}

// mt19937_64 engine with hand-rolled distributions so that draws are
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double prob) { return uniform01() < prob; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t below(std::uint64_t n) {  // uniform on [0, n)
    std::uint64_t mask = ~0ULL;
    std::uint64_t limit = mask - mask % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from {0,...,n-1}, in random order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hwg
