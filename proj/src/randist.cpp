#include "dncb/randist.hpp"

#include <cmath>
#include <stdexcept>

#include "dncb/specfun.hpp"

namespace dncb::randist {

namespace {

constexpr double kPositivityFloor = 1e-300;

}  // namespace

double sample_normal(RngStream& rng) {
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("sample_gamma: requires shape, rate > 0");
  }
  if (shape < 1.0) {
    // Boost: Gam(shape) = Gam(shape+1) * U^(1/shape).
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    const double u = rng.next_double();
    const double x = g * std::pow(u, 1.0 / shape);
    return std::max(x / rate, kPositivityFloor);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_normal(rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::max(d * v / rate, kPositivityFloor);
    }
  }
}

double sample_beta(double a, double b, RngStream& rng) {
  const double g1 = sample_gamma(a, 1.0, rng);
  const double g2 = sample_gamma(b, 1.0, rng);
  return g1 / (g1 + g2);
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (n < 0 || !(p >= 0.0) || !(p <= 1.0)) {
    throw std::domain_error("sample_binomial: requires n >= 0 and p in [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  if (n <= 64) {
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (rng.next_double() < p) ++count;
    }
    return count;
  }
  // Recursive split via the beta-distributed order statistic: the i-th
  // smallest of n uniforms is Beta(i, n+1-i); condition the count on it.
  const std::int64_t i = (n + 1) / 2;
  const double b = sample_beta(static_cast<double>(i),
                               static_cast<double>(n + 1 - i), rng);
  if (b <= p) {
    return i + sample_binomial(n - i, (p - b) / (1.0 - b), rng);
  }
  return sample_binomial(i - 1, p / b, rng);
}

std::int64_t sample_poisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("sample_poisson: requires finite lambda >= 0");
  }
  if (lambda == 0.0) return 0;
  std::int64_t result = 0;
  // Large means: peel off a gamma-distributed chunk of the interval
  // (Devroye); each round shrinks lambda by ~7/8.
  while (lambda > 30.0) {
    const auto n = static_cast<std::int64_t>(std::floor(0.875 * lambda));
    const double g = sample_gamma(static_cast<double>(n), 1.0, rng);
    if (g > lambda) {
      return result + sample_binomial(n - 1, lambda / g, rng);
    }
    result += n;
    lambda -= g;
  }
  // Knuth multiplication for the remainder.
  const double limit = std::exp(-lambda);
  double prod = 1.0;
  std::int64_t k = 0;
  do {
    ++k;
    prod *= rng.next_double();
  } while (prod > limit);
  return result + k - 1;
}

std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             const std::vector<double>& weights,
                                             RngStream& rng) {
  if (weights.empty()) {
    throw std::domain_error("sample_multinomial: empty weight vector");
  }
  if (n < 0) throw std::domain_error("sample_multinomial: requires n >= 0");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw std::domain_error("sample_multinomial: weights must be positive");
    }
    total += w;
  }
  std::vector<std::int64_t> counts(weights.size(), 0);
  std::int64_t remaining = n;
  double weight_left = total;
  for (std::size_t k = 0; k + 1 < weights.size() && remaining > 0; ++k) {
    const double p = std::min(1.0, weights[k] / weight_left);
    const std::int64_t c = sample_binomial(remaining, p, rng);
    counts[k] = c;
    remaining -= c;
    weight_left -= weights[k];
  }
  counts.back() = remaining;
  return counts;
}

double bessel_log_pmf(std::int64_t y, const BesselParams& p) {
  const double log_norm = specfun::log_bessel_i(p.v, p.a).value;
  const auto yd = static_cast<double>(y);
  return (2.0 * yd + p.v) * std::log(p.a / 2.0)
         - std::lgamma(yd + 1.0) - std::lgamma(yd + p.v + 1.0) - log_norm;
}

std::int64_t bessel_mode(const BesselParams& p) {
  if (p.a == 0.0) return 0;
  // Continuous root of p(y+1) = p(y): (y+1)(y+v+1) = (a/2)^2.
  const double root = 0.5 * (std::sqrt(p.v * p.v + p.a * p.a) - p.v - 2.0);
  auto m = static_cast<std::int64_t>(std::floor(root));
  if (m < 0) m = 0;
  // Unnormalized log pmf comparison between the two integer candidates.
  auto unpmf = [&](std::int64_t y) {
    const auto yd = static_cast<double>(y);
    return (2.0 * yd + p.v) * std::log(p.a / 2.0)
           - std::lgamma(yd + 1.0) - std::lgamma(yd + p.v + 1.0);
  };
  if (unpmf(m + 1) > unpmf(m)) ++m;
  return m;
}

std::int64_t sample_bessel(const BesselParams& p, RngStream& rng) {
  if (!(p.v > -1.0) || !(p.a >= 0.0) || !std::isfinite(p.a)) {
    throw std::domain_error("sample_bessel: requires v > -1 and finite a >= 0");
  }
  if (p.a == 0.0) return 0;

  const double u = rng.next_double();
  const double c = (p.a / 2.0) * (p.a / 2.0);
  auto up_ratio = [&](std::int64_t y) {  // p(y+1)/p(y)
    const auto yd = static_cast<double>(y);
    return c / ((yd + 1.0) * (yd + 1.0 + p.v));
  };

  if (p.a < 1e-2) {
    // The mode is 0 and p(0) ~ 1; invert the CDF by pmf recursion from 0.
    double pmf = std::exp(bessel_log_pmf(0, p));
    double cum = pmf;
    std::int64_t y = 0;
    while (cum < u && y < 1000) {
      pmf *= up_ratio(y);
      ++y;
      cum += pmf;
    }
    return y;
  }

  // Invert the CDF enumerating outward from the mode; the pmf is
  // log-concave so both tails decay at least geometrically once started.
  const std::int64_t m = bessel_mode(p);
  const double pm = std::exp(bessel_log_pmf(m, p));
  double cum = pm;
  if (cum >= u) return m;
  double p_up = pm;
  double p_dn = pm;
  std::int64_t y_up = m;
  std::int64_t y_dn = m;
  for (long step = 0; step < 100000000; ++step) {
    if (p_up > 0.0) {
      p_up *= up_ratio(y_up);
      ++y_up;
      cum += p_up;
      if (cum >= u) return y_up;
    }
    if (y_dn > 0 && p_dn > 0.0) {
      p_dn /= up_ratio(y_dn - 1);
      --y_dn;
      cum += p_dn;
      if (cum >= u) return y_dn;
    }
    // Residual tail mass below fp resolution: attribute it to the
    // farther enumerated point.
    if (p_up < 1e-18 * cum && (y_dn == 0 || p_dn < 1e-18 * cum)) {
      return y_up;
    }
  }
  throw std::runtime_error("sample_bessel: CDF inversion failed to terminate");
}

double sample_dncb(double e1, double e2, double l1, double l2, RngStream& rng) {
  if (!(e1 > 0.0) || !(e2 > 0.0) || !(l1 >= 0.0) || !(l2 >= 0.0)) {
    throw std::domain_error("sample_dncb: invalid parameters");
  }
  const std::int64_t y1 = sample_poisson(l1, rng);
  const std::int64_t y2 = sample_poisson(l2, rng);
  return sample_beta(e1 + static_cast<double>(y1),
                     e2 + static_cast<double>(y2), rng);
}

}  // namespace dncb::randist
