#pragma once
// Seeded random streams. Worker streams are pre-split from a master seed so
// results never depend on thread scheduling: stream i always sees the same
// sequence no matter when it runs.
#include <cstdint>
#include <random>

namespace ccopt {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform(double lo, double hi) {
    // 53-bit mantissa construction keeps the stream layout explicit
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // polar (Marsaglia) method, no spare caching
  double gauss() {
    for (;;) {
      double u = uniform(-1.0, 1.0);
      double v = uniform(-1.0, 1.0);
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  std::size_t index(std::size_t bound) {  // uniform in [0, bound)
    return static_cast<std::size_t>(uniform(0.0, 1.0) * static_cast<double>(bound)) % bound;
  }

 private:
  std::mt19937_64 gen_;
};

inline Rng worker_stream(std::uint64_t master, std::uint64_t worker_index) {
  return Rng(derive_seed(master, worker_index));
}

}  // namespace ccopt
