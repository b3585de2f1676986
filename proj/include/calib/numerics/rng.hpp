#pragma once

#include <cstdint>
#include <string_view>

namespace calib::num {

// Deterministic substream of uniform and normal variates.
//
// The generator is a SplitMix64 walk whose starting state is a mix of
// (seed, stream_id, substream_index), so any (cell, replicate) pair can be
// handed its own independent stream without coordination: results never
// depend on evaluation order or worker count. Normal variates go through
// the inverse cdf, which keeps sequences identical across platforms.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_id,
               std::uint64_t substream_index);

  // Uniform on the open interval (0,1).
  double next_uniform();

  // Normal with mean mu and standard deviation sigma >= 0. sigma == 0
  // consumes one uniform and returns mu, so draw positions stay aligned
  // across parameterizations.
  double next_normal(double mu, double sigma);

 private:
  std::uint64_t state_;
};

// One SplitMix64 scramble round; also usable as a key mixer.
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a accumulation of a text token into a running hash, finalized by the
// caller via splitmix64. Used to derive stream ids from canonical parameter
// renderings so they are independent of struct layout or grid position.
std::uint64_t hash_token(std::uint64_t h, std::string_view token);

}  // namespace calib::num
