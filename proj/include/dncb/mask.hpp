#ifndef DNCB_MASK_HPP
#define DNCB_MASK_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace dncb::eval {

// Random holdout: a duplicate-free set of (row, col) cells.
struct HoldoutMask {
  std::vector<std::pair<long, long>> held_out;
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

// Uniform subset without replacement of exactly round(fraction * n_rows *
// n_cols) cells; deterministic in the seed.
HoldoutMask make_mask(long n_rows, long n_cols, double fraction,
                      std::uint64_t seed);

}  // namespace dncb::eval

#endif
