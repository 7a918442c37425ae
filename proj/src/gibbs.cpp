#include "dncb/gibbs.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dncb::gibbs {

namespace {

// Substream tags, one per conditional; combined with the sweep index so
// every (step, sweep, entry) triple sees an independent stream.
enum StepTag : std::uint64_t {
  kInitFactors = 1,
  kInitCounts,
  kImpute,
  kGammaAux,
  kCounts,
  kThin,
  kTheta,
  kPhi,
  kRedraw,
};

constexpr double kLambdaCap = 1e12;

void parallel_for(long n, bool parallel, int workers,
                  const std::function<void(long, long)>& body) {
  int nw = workers > 0 ? workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  if (nw < 1) nw = 1;
  if (!parallel || nw == 1 || n < 2) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const long chunk = (n + nw - 1) / nw;
  for (int w = 0; w < nw; ++w) {
    const long begin = w * chunk;
    const long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(body, begin, end);
  }
  for (auto& t : pool) t.join();
}

double gamma_log_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double poisson_log_pmf(std::int64_t y, double lambda) {
  const auto yd = static_cast<double>(y);
  if (lambda <= 0.0) return y == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return yd * std::log(lambda) - lambda - std::lgamma(yd + 1.0);
}

}  // namespace

void SamplerConfig::validate() const {
  if (burnin < 0) throw std::domain_error("SamplerConfig: burnin must be >= 0");
  if (total < 1) throw std::domain_error("SamplerConfig: total must be >= 1");
  if (thin < 1 || thin > total) {
    throw std::domain_error("SamplerConfig: thin must lie in [1, total]");
  }
}

Sampler::Sampler(const model::BetaMatrix& beta, const eval::HoldoutMask* mask,
                 const model::Hyperparams& hyper, const SamplerConfig& config)
    : n_(beta.rows()),
      m_(beta.cols()),
      hyper_(hyper),
      config_(config),
      beta_(beta.values),
      base_(config.seed, 0) {
  hyper.validate();
  config.validate();
  beta.validate();
  masked_.assign(static_cast<std::size_t>(n_ * m_), 0);
  if (mask != nullptr && !mask->held_out.empty()) {
    has_mask_ = true;
    for (const auto& [i, j] : mask->held_out) {
      if (i < 0 || i >= n_ || j < 0 || j >= m_) {
        throw std::domain_error("Sampler: mask cell out of range");
      }
      masked_[static_cast<std::size_t>(i * m_ + j)] = 1;
    }
  }
  const int k = hyper_.K;
  state_.theta1 = model::Matrix::Zero(n_, k);
  state_.theta2 = model::Matrix::Zero(n_, k);
  state_.phi = model::Matrix::Zero(k, m_);
  aux_.y1 = model::CountMatrix::Zero(n_, m_);
  aux_.y2 = model::CountMatrix::Zero(n_, m_);
  aux_.gamma_tot = model::Matrix::Ones(n_, m_);
  aux_.gamma1 = beta_ * aux_.gamma_tot;
  aux_.gamma2 = aux_.gamma_tot - aux_.gamma1;  // exact complement
  aux_.theta1_counts = model::CountMatrix::Zero(n_, k);
  aux_.theta2_counts = model::CountMatrix::Zero(n_, k);
  aux_.phi_counts = model::CountMatrix::Zero(k, m_);
  init();
}

void Sampler::init() {
  const int k = hyper_.K;
  auto factor_rng = base_.substream(kInitFactors, 0);
  for (long i = 0; i < n_; ++i) {
    for (int c = 0; c < k; ++c) {
      auto rng = factor_rng.substream(static_cast<std::uint64_t>(i * k + c));
      state_.theta1(i, c) = randist::sample_gamma(hyper_.a0, hyper_.b0, rng);
      state_.theta2(i, c) = randist::sample_gamma(hyper_.a0, hyper_.b0, rng);
    }
  }
  for (int c = 0; c < k; ++c) {
    for (long j = 0; j < m_; ++j) {
      auto rng = factor_rng.substream(
          static_cast<std::uint64_t>(n_ * k + c * m_ + j));
      state_.phi(c, j) = randist::sample_gamma(hyper_.e0, hyper_.f0, rng);
    }
  }
  refresh_rates();
  auto count_rng = base_.substream(kInitCounts, 0);
  for (long i = 0; i < n_; ++i) {
    for (long j = 0; j < m_; ++j) {
      auto rng = count_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
      aux_.y1(i, j) = randist::sample_poisson(lam1_(i, j), rng);
      aux_.y2(i, j) = randist::sample_poisson(lam2_(i, j), rng);
    }
  }
}

void Sampler::refresh_rates() {
  lam1_ = (state_.theta1.matrix() * state_.phi.matrix()).array();
  lam2_ = (state_.theta2.matrix() * state_.phi.matrix()).array();
}

void Sampler::impute_masked(long sweep) {
  if (!has_mask_) return;
  auto step_rng = base_.substream(kImpute, static_cast<std::uint64_t>(sweep));
  for (long i = 0; i < n_; ++i) {
    for (long j = 0; j < m_; ++j) {
      if (!masked_[static_cast<std::size_t>(i * m_ + j)]) continue;
      auto rng = step_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
      const double b = randist::sample_beta(
          hyper_.eps1 + static_cast<double>(aux_.y1(i, j)),
          hyper_.eps2 + static_cast<double>(aux_.y2(i, j)), rng);
      bool clamped = false;
      beta_(i, j) = model::clamp_beta(b, clamped);
    }
  }
}

void Sampler::sample_gamma_aux(long sweep) {
  const double eps_tot = hyper_.eps1 + hyper_.eps2;
  auto step_rng = base_.substream(kGammaAux, static_cast<std::uint64_t>(sweep));
  parallel_for(n_, config_.parallel, config_.workers, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      for (long j = 0; j < m_; ++j) {
        auto rng = step_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
        const double shape =
            eps_tot + static_cast<double>(aux_.y1(i, j) + aux_.y2(i, j));
        const double gt = randist::sample_gamma(shape, 1.0, rng);
        aux_.gamma_tot(i, j) = gt;
        aux_.gamma1(i, j) = beta_(i, j) * gt;
        aux_.gamma2(i, j) = gt - aux_.gamma1(i, j);  // exact complement
      }
    }
  });
}

void Sampler::sample_counts(long sweep) {
  refresh_rates();
  const double v1 = (corrupt_swap_eps ? hyper_.eps2 : hyper_.eps1) - 1.0;
  const double v2 = (corrupt_swap_eps ? hyper_.eps1 : hyper_.eps2) - 1.0;
  auto step_rng = base_.substream(kCounts, static_cast<std::uint64_t>(sweep));
  std::atomic<long> cap_events{0};
  parallel_for(n_, config_.parallel, config_.workers, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      for (long j = 0; j < m_; ++j) {
        auto rng = step_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
        double l1 = lam1_(i, j);
        double l2 = lam2_(i, j);
        if (l1 > kLambdaCap || l2 > kLambdaCap) {
          l1 = std::min(l1, kLambdaCap);
          l2 = std::min(l2, kLambdaCap);
          ++cap_events;
        }
        aux_.y1(i, j) = randist::sample_bessel(
            {v1, 2.0 * std::sqrt(aux_.gamma1(i, j) * l1)}, rng);
        aux_.y2(i, j) = randist::sample_bessel(
            {v2, 2.0 * std::sqrt(aux_.gamma2(i, j) * l2)}, rng);
      }
    }
  });
  lambda_cap_events_ += cap_events.load();
}

void Sampler::thin_counts(long sweep) {
  const int k = hyper_.K;
  aux_.theta1_counts.setZero();
  aux_.theta2_counts.setZero();
  aux_.phi_counts.setZero();
  auto step_rng = base_.substream(kThin, static_cast<std::uint64_t>(sweep));
  // Row-partitioned: theta accumulators are row-private; per-thread
  // phi_counts buffers are reduced afterwards (integer sums, so the
  // result is independent of the partition).
  std::mutex reduce_mutex;
  parallel_for(n_, config_.parallel, config_.workers, [&](long r0, long r1) {
    model::CountMatrix local_phi = model::CountMatrix::Zero(k, m_);
    std::vector<double> weights(static_cast<std::size_t>(k));
    for (long i = r0; i < r1; ++i) {
      for (long j = 0; j < m_; ++j) {
        auto rng = step_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
        for (int r = 1; r <= 2; ++r) {
          const auto& theta = r == 1 ? state_.theta1 : state_.theta2;
          auto& theta_counts = r == 1 ? aux_.theta1_counts : aux_.theta2_counts;
          const std::int64_t y = r == 1 ? aux_.y1(i, j) : aux_.y2(i, j);
          if (y == 0) continue;
          for (int c = 0; c < k; ++c) {
            weights[static_cast<std::size_t>(c)] = theta(i, c) * state_.phi(c, j);
          }
          const auto sub = randist::sample_multinomial(y, weights, rng);
          for (int c = 0; c < k; ++c) {
            theta_counts(i, c) += sub[static_cast<std::size_t>(c)];
            local_phi(c, j) += sub[static_cast<std::size_t>(c)];
          }
        }
      }
    }
    std::lock_guard<std::mutex> lock(reduce_mutex);
    aux_.phi_counts += local_phi;
  });
}

void Sampler::update_factors(long sweep) {
  const int k = hyper_.K;
  // Rate terms use the current phi for theta and the fresh theta for phi.
  Eigen::ArrayXd phi_row_sums = state_.phi.rowwise().sum();
  auto theta_rng = base_.substream(kTheta, static_cast<std::uint64_t>(sweep));
  parallel_for(n_, config_.parallel, config_.workers, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      for (int c = 0; c < k; ++c) {
        auto rng = theta_rng.substream(static_cast<std::uint64_t>(i * k + c));
        const double rate = hyper_.b0 + phi_row_sums(c);
        state_.theta1(i, c) = std::max(
            randist::sample_gamma(
                hyper_.a0 + static_cast<double>(aux_.theta1_counts(i, c)), rate,
                rng),
            model::kPositivityFloor);
        state_.theta2(i, c) = std::max(
            randist::sample_gamma(
                hyper_.a0 + static_cast<double>(aux_.theta2_counts(i, c)), rate,
                rng),
            model::kPositivityFloor);
      }
    }
  });
  Eigen::ArrayXd theta_col_sums =
      (state_.theta1.colwise().sum() + state_.theta2.colwise().sum()).transpose();
  auto phi_rng = base_.substream(kPhi, static_cast<std::uint64_t>(sweep));
  parallel_for(m_, config_.parallel, config_.workers, [&](long c0, long c1) {
    for (long j = c0; j < c1; ++j) {
      for (int c = 0; c < k; ++c) {
        auto rng = phi_rng.substream(static_cast<std::uint64_t>(j * k + c));
        state_.phi(c, j) = std::max(
            randist::sample_gamma(
                hyper_.e0 + static_cast<double>(aux_.phi_counts(c, j)),
                hyper_.f0 + theta_col_sums(c), rng),
            model::kPositivityFloor);
      }
    }
  });
  refresh_rates();
}

void Sampler::sweep(long sweep_index) {
  impute_masked(sweep_index);
  sample_gamma_aux(sweep_index);
  sample_counts(sweep_index);
  thin_counts(sweep_index);
  update_factors(sweep_index);
}

void Sampler::redraw_data(long sweep) {
  auto step_rng = base_.substream(kRedraw, static_cast<std::uint64_t>(sweep));
  for (long i = 0; i < n_; ++i) {
    for (long j = 0; j < m_; ++j) {
      auto rng = step_rng.substream(static_cast<std::uint64_t>(i * m_ + j));
      const double b = randist::sample_beta(
          hyper_.eps1 + static_cast<double>(aux_.y1(i, j)),
          hyper_.eps2 + static_cast<double>(aux_.y2(i, j)), rng);
      bool clamped = false;
      beta_(i, j) = model::clamp_beta(b, clamped);
    }
  }
}

double Sampler::log_joint() const {
  double lp = 0.0;
  for (long i = 0; i < n_; ++i) {
    for (int c = 0; c < hyper_.K; ++c) {
      lp += gamma_log_pdf(state_.theta1(i, c), hyper_.a0, hyper_.b0);
      lp += gamma_log_pdf(state_.theta2(i, c), hyper_.a0, hyper_.b0);
    }
  }
  for (int c = 0; c < hyper_.K; ++c) {
    for (long j = 0; j < m_; ++j) {
      lp += gamma_log_pdf(state_.phi(c, j), hyper_.e0, hyper_.f0);
    }
  }
  for (long i = 0; i < n_; ++i) {
    for (long j = 0; j < m_; ++j) {
      lp += poisson_log_pmf(aux_.y1(i, j), lam1_(i, j));
      lp += poisson_log_pmf(aux_.y2(i, j), lam2_(i, j));
      lp += model::beta_log_pdf(
          beta_(i, j), hyper_.eps1 + static_cast<double>(aux_.y1(i, j)),
          hyper_.eps2 + static_cast<double>(aux_.y2(i, j)));
    }
  }
  return lp;
}

PosteriorChain Sampler::run() {
  PosteriorChain chain;
  chain.config = config_;
  chain.hyper = hyper_;
  const long sweeps = config_.burnin + config_.total;
  chain.log_joint_trace.reserve(static_cast<std::size_t>(sweeps));
  for (long s = 1; s <= sweeps; ++s) {
    sweep(s);
    chain.log_joint_trace.push_back(log_joint());
    if (s > config_.burnin && (s - config_.burnin) % config_.thin == 0) {
      chain.snapshots.emplace_back(s, state_);
    }
  }
  return chain;
}

PosteriorChain run(const model::BetaMatrix& beta, const eval::HoldoutMask* mask,
                   const model::Hyperparams& hyper,
                   const SamplerConfig& config) {
  Sampler sampler(beta, mask, hyper, config);
  return sampler.run();
}

namespace {

// Accumulates the 12 tracked moments: first and second moments of the
// element means of theta1, theta2, phi, y1, y2, beta.
struct MomentTracker {
  static constexpr int kStats = 12;
  std::vector<std::array<double, kStats>> samples;

  void record(const model::FactorState& state, const AuxState& aux,
              const model::Matrix& beta) {
    std::array<double, kStats> s{};
    s[0] = state.theta1.mean();
    s[1] = state.theta2.mean();
    s[2] = state.phi.mean();
    s[3] = aux.y1.cast<double>().mean();
    s[4] = aux.y2.cast<double>().mean();
    s[5] = beta.mean();
    s[6] = state.theta1.square().mean();
    s[7] = state.theta2.square().mean();
    s[8] = state.phi.square().mean();
    s[9] = aux.y1.cast<double>().square().mean();
    s[10] = aux.y2.cast<double>().square().mean();
    s[11] = beta.square().mean();
    samples.push_back(s);
  }

  static const char* stat_name(int idx) {
    static const char* names[kStats] = {
        "mean(theta1)", "mean(theta2)", "mean(phi)",  "mean(y1)",
        "mean(y2)",     "mean(beta)",   "m2(theta1)", "m2(theta2)",
        "m2(phi)",      "m2(y1)",       "m2(y2)",     "m2(beta)"};
    return names[idx];
  }

  double mean(int idx) const {
    double s = 0.0;
    for (const auto& row : samples) s += row[static_cast<std::size_t>(idx)];
    return s / static_cast<double>(samples.size());
  }

  // Batch-means standard error; absorbs autocorrelation in the
  // successive-conditional arm.
  double std_error(int idx, long batches) const {
    const long n = static_cast<long>(samples.size());
    const long per_batch = n / batches;
    const double overall = mean(idx);
    double var = 0.0;
    for (long b = 0; b < batches; ++b) {
      double bm = 0.0;
      for (long t = b * per_batch; t < (b + 1) * per_batch; ++t) {
        bm += samples[static_cast<std::size_t>(t)][static_cast<std::size_t>(idx)];
      }
      bm /= static_cast<double>(per_batch);
      var += (bm - overall) * (bm - overall);
    }
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
  }
};

model::BetaMatrix uniform_placeholder(long n, long m) {
  model::BetaMatrix beta;
  beta.values = model::Matrix::Constant(n, m, 0.5);
  for (long i = 0; i < n; ++i) beta.row_ids.push_back("r" + std::to_string(i));
  for (long j = 0; j < m; ++j) beta.col_ids.push_back("c" + std::to_string(j));
  return beta;
}

}  // namespace

GewekeReport geweke_check(const model::Hyperparams& hyper,
                          const GewekeConfig& config) {
  hyper.validate();
  const long n = config.n;
  const long m = config.m;
  const int k = hyper.K;

  // Forward arm: independent draws from the full generative model.
  MomentTracker forward;
  randist::RngStream fwd_base(config.seed, 1);
  for (long t = 0; t < config.samples; ++t) {
    auto rng = fwd_base.substream(static_cast<std::uint64_t>(t));
    model::FactorState state;
    state.theta1 = model::Matrix::Zero(n, k);
    state.theta2 = model::Matrix::Zero(n, k);
    state.phi = model::Matrix::Zero(k, m);
    for (long i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        state.theta1(i, c) = randist::sample_gamma(hyper.a0, hyper.b0, rng);
        state.theta2(i, c) = randist::sample_gamma(hyper.a0, hyper.b0, rng);
      }
    }
    for (int c = 0; c < k; ++c) {
      for (long j = 0; j < m; ++j) {
        state.phi(c, j) = randist::sample_gamma(hyper.e0, hyper.f0, rng);
      }
    }
    AuxState aux;
    aux.y1 = model::CountMatrix::Zero(n, m);
    aux.y2 = model::CountMatrix::Zero(n, m);
    model::Matrix beta(n, m);
    const model::Matrix lam1 =
        (state.theta1.matrix() * state.phi.matrix()).array();
    const model::Matrix lam2 =
        (state.theta2.matrix() * state.phi.matrix()).array();
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < m; ++j) {
        aux.y1(i, j) = randist::sample_poisson(lam1(i, j), rng);
        aux.y2(i, j) = randist::sample_poisson(lam2(i, j), rng);
        beta(i, j) = randist::sample_beta(
            hyper.eps1 + static_cast<double>(aux.y1(i, j)),
            hyper.eps2 + static_cast<double>(aux.y2(i, j)), rng);
      }
    }
    forward.record(state, aux, beta);
  }

  // Successive-conditional arm: Gibbs sweep on the latents, then a data
  // re-draw given the latents.
  MomentTracker gibbs_arm;
  SamplerConfig sc;
  sc.burnin = 0;
  sc.total = 1;
  sc.thin = 1;
  sc.seed = config.seed + 1;
  Sampler sampler(uniform_placeholder(n, m), nullptr, hyper, sc);
  sampler.corrupt_swap_eps = config.corrupt;
  sampler.redraw_data(0);
  for (long t = 1; t <= config.samples; ++t) {
    sampler.sweep(t);
    sampler.redraw_data(t);
    gibbs_arm.record(sampler.state(), sampler.aux(), sampler.working_beta());
  }

  GewekeReport report;
  for (int idx = 0; idx < MomentTracker::kStats; ++idx) {
    const double mf = forward.mean(idx);
    const double mg = gibbs_arm.mean(idx);
    const double se_f = forward.std_error(idx, config.batches);
    const double se_g = gibbs_arm.std_error(idx, config.batches);
    const double z = (mf - mg) / std::sqrt(se_f * se_f + se_g * se_g);
    report.stats.push_back({MomentTracker::stat_name(idx), mf, mg, z});
    report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
  }
  return report;
}

}  // namespace dncb::gibbs
