#ifndef DNCB_RANDIST_HPP
#define DNCB_RANDIST_HPP

#include <cstdint>
#include <vector>

#include "dncb/rng.hpp"

namespace dncb::randist {

// Parameters of the Bessel distribution Bes(y; v, a) with pmf
// (a/2)^(2y+v) / (y! Gamma(y+v+1) I_v(a)).
struct BesselParams {
  double v;  // order, > -1
  double a;  // argument, >= 0
};

double sample_normal(RngStream& rng);

// Shape-rate convention: mean = shape/rate.
double sample_gamma(double shape, double rate, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

std::int64_t sample_poisson(double lambda, RngStream& rng);

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);

// Counts summing to n with marginal Binomial(n, w_k / sum(w)).
std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             const std::vector<double>& weights,
                                             RngStream& rng);

std::int64_t sample_bessel(const BesselParams& p, RngStream& rng);

// Composite draw per the Poisson-randomized beta construction:
// y_r ~ Pois(l_r), then Beta(e1 + y1, e2 + y2).
double sample_dncb(double e1, double e2, double l1, double l2, RngStream& rng);

// log pmf of Bes(y; v, a); used by the sampler and exposed for tests.
double bessel_log_pmf(std::int64_t y, const BesselParams& p);

// Mode of Bes(v, a).
std::int64_t bessel_mode(const BesselParams& p);

}  // namespace dncb::randist

#endif
