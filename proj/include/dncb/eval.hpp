#ifndef DNCB_EVAL_HPP
#define DNCB_EVAL_HPP

#include <vector>

#include "dncb/gibbs.hpp"
#include "dncb/mask.hpp"
#include "dncb/model.hpp"

namespace dncb::eval {

struct PpdReport {
  double log_ppd_total = 0.0;  // sum over held-out cells of log mean density
  double scaled_ppd = 0.0;     // exp(log_ppd_total / |held_out|)
  std::vector<double> per_cell_log;
  long convergence_failures = 0;  // cells where the density series failed
};

// Pointwise predictive density over the held-out cells: for each cell the
// DNCB density given each snapshot's factors, averaged across snapshots
// in log space.
PpdReport ppd(const gibbs::PosteriorChain& chain, const model::BetaMatrix& beta,
              const HoldoutMask& mask, const model::Hyperparams& hyper);

}  // namespace dncb::eval

#endif
