#ifndef DNCB_RNG_HPP
#define DNCB_RNG_HPP

#include <cstdint>

namespace dncb::randist {

// Counter-based stream: every draw is a pure function of
// (seed, stream_id, counter), so per-entry substreams are reproducible
// independent of thread count or draw interleaving.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  // Derive a statistically independent child stream with counter 0.
  RngStream substream(std::uint64_t id) const;
  RngStream substream(std::uint64_t id_a, std::uint64_t id_b) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0,1).
  double next_double();

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next_u64(); }

 private:
  explicit RngStream(std::uint64_t key) : key_(key) {}
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace dncb::randist

#endif
