#include "dncb/rng.hpp"

namespace dncb::randist {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t combine(std::uint64_t key, std::uint64_t id) {
  return mix(mix(key + kGolden) ^ mix(id * kGolden + 1));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(combine(mix(seed), stream_id)) {}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(combine(key_, id));
}

RngStream RngStream::substream(std::uint64_t id_a, std::uint64_t id_b) const {
  return RngStream(combine(combine(key_, id_a), id_b));
}

std::uint64_t RngStream::next_u64() {
  return mix(key_ + (++ctr_) * kGolden);
}

double RngStream::next_double() {
  // 53 random bits mapped to (0,1); the +0.5 offset keeps both
  // endpoints excluded so log(u) and log1p(-u) are always finite.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dncb::randist
