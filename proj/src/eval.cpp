#include "dncb/eval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dncb/rng.hpp"
#include "dncb/specfun.hpp"

namespace dncb::eval {

HoldoutMask make_mask(long n_rows, long n_cols, double fraction,
                      std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw std::domain_error("make_mask: fraction must lie in (0,1)");
  }
  if (n_rows < 1 || n_cols < 1) {
    throw std::domain_error("make_mask: empty matrix");
  }
  const long cells = n_rows * n_cols;
  const auto count = static_cast<long>(
      std::llround(fraction * static_cast<double>(cells)));
  HoldoutMask mask;
  mask.fraction = fraction;
  mask.seed = seed;
  // Partial Fisher-Yates over the flat cell indices.
  std::vector<long> idx(static_cast<std::size_t>(cells));
  for (long c = 0; c < cells; ++c) idx[static_cast<std::size_t>(c)] = c;
  randist::RngStream rng(seed, 0);
  for (long c = 0; c < count; ++c) {
    const auto span = static_cast<std::uint64_t>(cells - c);
    const long pick = c + static_cast<long>(rng.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(c)],
              idx[static_cast<std::size_t>(pick)]);
    mask.held_out.emplace_back(idx[static_cast<std::size_t>(c)] / n_cols,
                               idx[static_cast<std::size_t>(c)] % n_cols);
  }
  return mask;
}

PpdReport ppd(const gibbs::PosteriorChain& chain, const model::BetaMatrix& beta,
              const HoldoutMask& mask, const model::Hyperparams& hyper) {
  if (chain.snapshots.empty()) {
    throw std::domain_error("ppd: empty posterior chain");
  }
  if (mask.held_out.empty()) {
    throw std::domain_error("ppd: empty holdout mask");
  }
  const auto s_count = static_cast<double>(chain.snapshots.size());
  PpdReport report;
  for (const auto& [i, j] : mask.held_out) {
    if (i < 0 || i >= beta.rows() || j < 0 || j >= beta.cols()) {
      throw std::domain_error("ppd: mask cell outside the matrix");
    }
    const double b = beta.values(i, j);
    // log mean over snapshots via log-sum-exp.
    double log_acc = -std::numeric_limits<double>::infinity();
    bool failed = false;
    for (const auto& [sweep, state] : chain.snapshots) {
      (void)sweep;
      const auto rp = model::rates(state, i, j);
      try {
        const double lp =
            model::dncb_log_pdf(b, hyper.eps1, hyper.eps2, rp.lam1, rp.lam2)
                .value;
        log_acc = specfun::log_add(log_acc, lp);
      } catch (const specfun::ConvergenceError&) {
        failed = true;
      }
    }
    if (failed) ++report.convergence_failures;
    const double cell_log = log_acc - std::log(s_count);
    report.per_cell_log.push_back(cell_log);
    report.log_ppd_total += cell_log;
  }
  report.scaled_ppd = std::exp(
      report.log_ppd_total / static_cast<double>(mask.held_out.size()));
  return report;
}

}  // namespace dncb::eval
