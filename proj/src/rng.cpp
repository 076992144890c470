#include "lbr/rng.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace lbr {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  return mix64(state);
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RngStream RngStream::child(std::uint64_t index) const {
  const std::uint64_t h = mix64(mix64(stream_id ^ 0x5851F42D4C957F2Dull) +
                                0x9E3779B97F4A7C15ull * (index + 1));
  return RngStream{seed, h};
}

Xoshiro256::Xoshiro256(std::uint64_t key) {
  std::uint64_t state = key;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

namespace {
std::uint64_t stream_key(const RngStream& s) {
  return mix64(s.seed + 0x2545F4914F6CDD1Dull) ^ mix64(s.stream_id * 0xD1342543DE82EF95ull + 1);
}
}  // namespace

RandomSource::RandomSource(const RngStream& stream) : engine_(stream_key(stream)) {}

double RandomSource::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::normal() {
  return boost::random::normal_distribution<double>{}(engine_);
}

double RandomSource::exponential() {
  return boost::random::exponential_distribution<double>{}(engine_);
}

std::uint64_t RandomSource::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return boost::random::poisson_distribution<std::uint64_t, double>{mean}(engine_);
}

double RandomSource::stable(double alpha) {
  constexpr double pi = std::numbers::pi;
  const double v = pi * (uniform() - 0.5);
  const double w = exponential();
  if (alpha == 1.0) {
    // beta = -1 branch of the Chambers-Mallows-Stuck formula
    const double a = pi / 2 - v;
    return (2 / pi) * (a * std::tan(v) + std::log((pi / 2) * w * std::cos(v) / a));
  }
  const double t = std::tan(pi * alpha / 2);
  const double b = std::atan(-t) / alpha;
  const double s = std::pow(1 + t * t, 1 / (2 * alpha));
  const double x = alpha * (v + b);
  return s * std::sin(x) / std::pow(std::cos(v), 1 / alpha) *
         std::pow(std::cos(v - x) / w, (1 - alpha) / alpha);
}

}  // namespace lbr
