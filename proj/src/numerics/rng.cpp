#include "calib/numerics/rng.hpp"

#include "calib/numerics/normal.hpp"

namespace calib::num {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_token(std::uint64_t h, std::string_view token) {
  for (unsigned char ch : token) {
    h ^= ch;
    h *= 0x100000001B3ULL;  // FNV-1a prime
  }
  return h;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream_id,
                           std::uint64_t substream_index) {
  // Fold the three keys through the scrambler so that neighbouring indices
  // land in unrelated regions of the state space.
  std::uint64_t s = seed;
  std::uint64_t acc = splitmix64(s);
  s ^= stream_id;
  acc ^= splitmix64(s);
  s ^= substream_index;
  acc ^= splitmix64(s);
  state_ = acc;
}

double NormalStream::next_uniform() {
  std::uint64_t z = splitmix64(state_);
  // 53 mantissa bits, offset half a step: strictly inside (0,1).
  return static_cast<double>(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double NormalStream::next_normal(double mu, double sigma) {
  const double u = next_uniform();
  if (sigma == 0.0) return mu;  // position consumed, value exact
  return mu + sigma * std_normal_quantile(u);
}

}  // namespace calib::num
