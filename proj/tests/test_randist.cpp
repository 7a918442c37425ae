#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dncb/model.hpp"
#include "dncb/randist.hpp"
#include "dncb/specfun.hpp"
#include "support/oracles.hpp"

using namespace dncb::randist;

namespace {

// Analytic Bessel mean (a/2) I_{v+1}(a) / I_v(a).
double bessel_mean(double v, double a) {
  return (a / 2.0) * std::exp(dncb::specfun::log_bessel_i(v + 1.0, a).value -
                              dncb::specfun::log_bessel_i(v, a).value);
}

}  // namespace

TEST_CASE("RngStream determinism and stream independence") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 8);
  RngStream d(43, 7);
  int same_c = 0, same_d = 0;
  RngStream a2(42, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a2.next_u64();
    if (x == c.next_u64()) ++same_c;
    if (x == d.next_u64()) ++same_d;
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);

  // Substream derivation is itself deterministic.
  RngStream base(1, 0);
  auto s1 = base.substream(5);
  auto s2 = RngStream(1, 0).substream(5);
  CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("uniform doubles stay inside (0,1) and look uniform") {
  RngStream rng(9, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample_gamma moments: mean shape/rate") {
  RngStream rng(1, 0);
  const long n = 100000;
  std::vector<double> draws;
  for (long i = 0; i < n; ++i) draws.push_back(sample_gamma(2.0, 4.0, rng));
  const double m = oracles::mean(draws);
  const double se = std::sqrt(oracles::variance(draws) / n);
  CHECK(std::abs(m - 0.5) < 4.0 * se);
}

TEST_CASE("sample_gamma(1,1) is Exp(1): KS test") {
  RngStream rng(2, 0);
  const long n = 20000;
  std::vector<double> draws;
  for (long i = 0; i < n; ++i) draws.push_back(sample_gamma(1.0, 1.0, rng));
  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  for (long i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-draws[i]);
    d = std::max(d, std::abs(cdf - (i + 1.0) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(oracles::ks_p_value(d, n) > 0.001);
}

TEST_CASE("sample_gamma small shape: no zero or NaN draws") {
  RngStream rng(3, 0);
  for (long i = 0; i < 1000000; ++i) {
    const double x = sample_gamma(0.1, 0.1, rng);
    REQUIRE(x > 0.0);
    REQUIRE(std::isfinite(x));
  }
}

TEST_CASE("sample_gamma domain errors") {
  RngStream rng(0, 0);
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), std::domain_error);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), std::domain_error);
}

TEST_CASE("sample_poisson matches moments at small and large means") {
  RngStream rng(4, 0);
  for (double lambda : {0.3, 5.0, 80.0}) {
    const long n = 100000;
    std::vector<double> draws;
    for (long i = 0; i < n; ++i) {
      draws.push_back(static_cast<double>(sample_poisson(lambda, rng)));
    }
    const double se = std::sqrt(oracles::variance(draws) / n);
    CHECK(std::abs(oracles::mean(draws) - lambda) < 4.0 * se);
    CHECK(oracles::variance(draws) == doctest::Approx(lambda).epsilon(0.05));
  }
  CHECK(sample_poisson(0.0, rng) == 0);
}

TEST_CASE("sample_binomial marginals at large n (recursive split path)") {
  RngStream rng(5, 0);
  const long n_trials = 1000;
  const double p = 0.3;
  const long reps = 20000;
  std::vector<double> draws;
  for (long i = 0; i < reps; ++i) {
    draws.push_back(static_cast<double>(sample_binomial(n_trials, p, rng)));
  }
  const double se = std::sqrt(oracles::variance(draws) / reps);
  CHECK(std::abs(oracles::mean(draws) - n_trials * p) < 4.0 * se);
  CHECK(oracles::variance(draws) ==
        doctest::Approx(n_trials * p * (1 - p)).epsilon(0.08));
}

TEST_CASE("sample_multinomial: support and binomial marginals") {
  RngStream rng(6, 0);
  CHECK(sample_multinomial(0, {1.0, 2.0}, rng) ==
        std::vector<std::int64_t>{0, 0});
  CHECK(sample_multinomial(7, {3.0}, rng) == std::vector<std::int64_t>{7});

  const std::vector<double> w{1.0, 1.0, 2.0};
  const long reps = 10000;
  std::vector<double> c0, c1, c2;
  for (long i = 0; i < reps; ++i) {
    const auto counts = sample_multinomial(100, w, rng);
    CHECK(counts[0] + counts[1] + counts[2] == 100);
    c0.push_back(static_cast<double>(counts[0]));
    c1.push_back(static_cast<double>(counts[1]));
    c2.push_back(static_cast<double>(counts[2]));
  }
  CHECK(std::abs(oracles::mean(c0) - 25.0) <
        4.0 * std::sqrt(oracles::variance(c0) / reps));
  CHECK(std::abs(oracles::mean(c1) - 25.0) <
        4.0 * std::sqrt(oracles::variance(c1) / reps));
  CHECK(std::abs(oracles::mean(c2) - 50.0) <
        4.0 * std::sqrt(oracles::variance(c2) / reps));

  CHECK_THROWS_AS(sample_multinomial(3, {}, rng), std::domain_error);
  CHECK_THROWS_AS(sample_multinomial(3, {1.0, 0.0}, rng), std::domain_error);
}

TEST_CASE("sample_bessel: a=0 is a point mass at zero") {
  RngStream rng(7, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_bessel({-0.25, 0.0}, rng) == 0);
}

TEST_CASE("sample_bessel empirical mean matches the Bessel-ratio mean") {
  RngStream rng(8, 0);
  for (double v : {-0.25, 0.0, 1.0}) {
    for (double a : {0.5, 2.0, 20.0}) {
      const long n = 100000;
      std::vector<double> draws;
      for (long i = 0; i < n; ++i) {
        draws.push_back(static_cast<double>(sample_bessel({v, a}, rng)));
      }
      const double want = bessel_mean(v, a);
      const double se = std::sqrt(oracles::variance(draws) / n);
      INFO("v=", v, " a=", a);
      CHECK(std::abs(oracles::mean(draws) - want) < 4.0 * se);
    }
  }
}

TEST_CASE("sample_bessel pmf: chi-squared against the exact pmf") {
  RngStream rng(9, 0);
  const double v = 0.0;
  const double a = 5.0;
  const long n = 100000;
  std::map<std::int64_t, long> hist;
  for (long i = 0; i < n; ++i) ++hist[sample_bessel({v, a}, rng)];

  // Truncated exact pmf with tail mass < 1e-12.
  std::vector<double> pmf;
  double cum = 0.0;
  for (std::int64_t y = 0; cum < 1.0 - 1e-12 && y < 500; ++y) {
    pmf.push_back(std::exp(bessel_log_pmf(y, {v, a})));
    cum += pmf.back();
  }
  // Pool bins with expected count < 5 into the tail.
  double chi2 = 0.0;
  int dof = -1;
  double pooled_exp = 0.0;
  long pooled_obs = 0;
  for (std::size_t y = 0; y < pmf.size(); ++y) {
    const double expect = pmf[y] * n;
    const long obs = hist.count(static_cast<std::int64_t>(y))
                         ? hist.at(static_cast<std::int64_t>(y))
                         : 0;
    if (expect < 5.0) {
      pooled_exp += expect;
      pooled_obs += obs;
      continue;
    }
    chi2 += (obs - expect) * (obs - expect) / expect;
    ++dof;
  }
  if (pooled_exp > 0.0) {
    chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++dof;
  }
  CHECK(oracles::chi2_sf(chi2, dof) > 0.001);
}

TEST_CASE("sample_bessel determinism across reconstructed streams") {
  std::vector<std::int64_t> first;
  for (int rep = 0; rep < 2; ++rep) {
    RngStream rng(1234, 77);
    std::vector<std::int64_t> seq;
    for (int i = 0; i < 200; ++i) seq.push_back(sample_bessel({-0.25, 3.0}, rng));
    if (rep == 0) {
      first = seq;
    } else {
      CHECK(first == seq);
    }
  }
}

TEST_CASE("sample_bessel domain errors and edge params") {
  RngStream rng(0, 0);
  CHECK_THROWS_AS(sample_bessel({-1.0, 1.0}, rng), std::domain_error);
  CHECK_THROWS_AS(sample_bessel({0.0, -1.0}, rng), std::domain_error);
  // Tiny argument: inversion fallback, almost always 0.
  long nonzero = 0;
  for (int i = 0; i < 10000; ++i) {
    if (sample_bessel({-0.25, 1e-3}, rng) != 0) ++nonzero;
  }
  CHECK(nonzero < 10);
  // Huge argument: stays finite and near the mode.
  const double a = 1e6;
  const auto y = sample_bessel({0.5, a}, rng);
  CHECK(std::abs(static_cast<double>(y) - a / 2.0) < 1e4);
}

TEST_CASE("sample_dncb: beta reduction at zero rates (KS test)") {
  RngStream rng(10, 0);
  const long n = 100000;
  std::vector<double> draws;
  for (long i = 0; i < n; ++i) draws.push_back(sample_dncb(2.0, 3.0, 0.0, 0.0, rng));
  std::sort(draws.begin(), draws.end());
  // Beta(2,3) CDF via its closed-form polynomial.
  auto cdf = [](double x) {
    return x * x * (6.0 - 8.0 * x + 3.0 * x * x);
  };
  double d = 0.0;
  for (long i = 0; i < n; ++i) {
    d = std::max(d, std::abs(cdf(draws[i]) - (i + 1.0) / n));
    d = std::max(d, std::abs(cdf(draws[i]) - static_cast<double>(i) / n));
  }
  CHECK(oracles::ks_p_value(d, n) > 0.001);
}

TEST_CASE("sample_dncb draws stay strictly inside (0,1)") {
  RngStream rng(11, 0);
  for (long i = 0; i < 100000; ++i) {
    const double b = sample_dncb(0.5, 0.5, 10.0, 10.0, rng);
    REQUIRE(b > 0.0);
    REQUIRE(b < 1.0);
  }
}

TEST_CASE("sample_dncb histogram matches the density (chi-squared)") {
  RngStream rng(12, 0);
  const double e1 = 0.5, e2 = 0.5, l1 = 10.0, l2 = 10.0;
  const long n = 100000;
  const int bins = 50;
  std::vector<long> hist(bins, 0);
  for (long i = 0; i < n; ++i) {
    const double b = sample_dncb(e1, e2, l1, l2, rng);
    ++hist[std::min(bins - 1, static_cast<int>(b * bins))];
  }
  auto density = [&](double x) {
    return std::exp(dncb::model::dncb_log_pdf(x, e1, e2, l1, l2).value);
  };
  double chi2 = 0.0;
  int dof = -1;
  double prev_cdf = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double cdf =
        oracles::beta_like_cdf(density, e1, e2, (b + 1.0) / bins);
    const double expect = n * (cdf - prev_cdf);
    prev_cdf = cdf;
    REQUIRE(expect > 5.0);
    chi2 += (hist[b] - expect) * (hist[b] - expect) / expect;
    ++dof;
  }
  CHECK(oracles::chi2_sf(chi2, dof) > 0.001);
}
