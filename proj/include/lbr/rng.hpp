#pragma once

#include <array>
#include <cstdint>

namespace lbr {

// Names a reproducible random stream. Substreams are derived by hashing, so a
// replica, particle or path half can be addressed without sharing state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream child(std::uint64_t index) const;
  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t x);

// xoshiro256** seeded through splitmix64. Cheap to construct, which matters
// because every particle path gets its own substream.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::array<std::uint64_t, 4> s_{};
};

class RandomSource {
 public:
  explicit RandomSource(const RngStream& stream);

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  std::uint64_t poisson(double mean);
  // Standard totally left-skewed stable variate S_alpha(1, -1, 0).
  double stable(double alpha);

  Xoshiro256& engine() { return engine_; }

 private:
  Xoshiro256 engine_;
};

}  // namespace lbr
