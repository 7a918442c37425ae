#ifndef DNCB_GIBBS_HPP
#define DNCB_GIBBS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dncb/mask.hpp"
#include "dncb/model.hpp"
#include "dncb/randist.hpp"

namespace dncb::gibbs {

struct SamplerConfig {
  long burnin = 1000;
  long total = 2000;  // sweeps after burn-in
  long thin = 20;
  std::uint64_t seed = 0;
  bool parallel = false;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Per-entry auxiliary variables plus the component-level sufficient
// statistics produced by multinomial thinning.  Subcount K-vectors are
// transient; only their aggregates are stored.
struct AuxState {
  model::CountMatrix y1;     // N x M
  model::CountMatrix y2;     // N x M
  model::Matrix gamma_tot;   // N x M
  model::Matrix gamma1;      // N x M
  model::Matrix gamma2;      // N x M
  model::CountMatrix theta1_counts;  // N x K: sum_j y1_ijk
  model::CountMatrix theta2_counts;  // N x K: sum_j y2_ijk
  model::CountMatrix phi_counts;     // K x M: sum_i sum_r y_ijk
};

struct PosteriorChain {
  std::vector<std::pair<long, model::FactorState>> snapshots;
  std::vector<double> log_joint_trace;  // one value per sweep
  SamplerConfig config;
  model::Hyperparams hyper;
};

// One chain; single writer.  Step methods are public so tests and the
// Geweke harness can drive individual conditionals.
class Sampler {
 public:
  // mask may be null for a fully observed fit.
  Sampler(const model::BetaMatrix& beta, const eval::HoldoutMask* mask,
          const model::Hyperparams& hyper, const SamplerConfig& config);

  // Factors from their priors, counts from the implied Poisson rates.
  void init();

  // Conditional beta draw at masked cells only; no-op without a mask.
  void impute_masked(long sweep);
  // gamma_tot ~ Gam(eps_tot + y_tot, 1); split deterministically by beta.
  void sample_gamma_aux(long sweep);
  // y_r ~ Bes(eps_r - 1, 2 sqrt(gamma_r * lam_r)) per entry.
  void sample_counts(long sweep);
  // Subcounts ~ Mult(y_r, theta_r[i,.] * phi[.,j]), aggregated in place.
  void thin_counts(long sweep);
  // Gamma-Poisson conjugate draws; theta first, then phi from fresh theta.
  void update_factors(long sweep);

  // One full sweep in the order above.
  void sweep(long sweep_index);

  PosteriorChain run();

  // Re-draw every beta entry from Beta(eps1+y1, eps2+y2); the data step
  // of the successive-conditional (Geweke) loop.
  void redraw_data(long sweep);

  double log_joint() const;

  const model::FactorState& state() const { return state_; }
  model::FactorState& state() { return state_; }
  const AuxState& aux() const { return aux_; }
  AuxState& aux() { return aux_; }
  const model::Matrix& working_beta() const { return beta_; }
  long lambda_cap_events() const { return lambda_cap_events_; }

  // Test hook: swap eps1/eps2 inside the Bessel conditional only.
  bool corrupt_swap_eps = false;

 private:
  void refresh_rates();

  long n_, m_;
  model::Hyperparams hyper_;
  SamplerConfig config_;
  model::Matrix beta_;
  std::vector<std::uint8_t> masked_;  // row-major N x M flags
  bool has_mask_ = false;
  model::FactorState state_;
  AuxState aux_;
  model::Matrix lam1_, lam2_;  // current rates, refreshed per sweep
  randist::RngStream base_;
  long lambda_cap_events_ = 0;
};

// Convenience wrapper: construct a Sampler and run the full schedule.
PosteriorChain run(const model::BetaMatrix& beta, const eval::HoldoutMask* mask,
                   const model::Hyperparams& hyper, const SamplerConfig& config);

struct GewekeConfig {
  long n = 3;
  long m = 4;
  long samples = 10000;
  long batches = 100;
  std::uint64_t seed = 0;
  bool corrupt = false;  // corrupt one conditional; the test must notice
};

struct GewekeStat {
  std::string name;
  double forward_mean;
  double gibbs_mean;
  double z;
};

struct GewekeReport {
  std::vector<GewekeStat> stats;
  double max_abs_z = 0.0;
};

// Forward simulation vs successive-conditional simulation; first and
// second moments of theta, phi, y, beta are compared via z-scores.
GewekeReport geweke_check(const model::Hyperparams& hyper,
                          const GewekeConfig& config);

}  // namespace dncb::gibbs

#endif
