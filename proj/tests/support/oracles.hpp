// Test-only oracles: brute-force series, quadrature, and classical test
// statistics.  Everything here is independent of the library's own
// special-function and sampling code paths.
#ifndef DNCB_TESTS_ORACLES_HPP
#define DNCB_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// log I_v(a) by direct long double summation of the defining series.
inline double log_bessel_i_series(double v, double a) {
  if (a == 0.0) return v == 0.0 ? 0.0L : -INFINITY;
  const long double half_a = static_cast<long double>(a) / 2.0L;
  long double term = std::exp(static_cast<long double>(v) * std::log(half_a) -
                              lgammal(static_cast<long double>(v) + 1.0L));
  long double sum = term;
  for (long m = 0; m < 2000000; ++m) {
    term *= half_a * half_a / ((m + 1.0L) * (m + 1.0L + static_cast<long double>(v)));
    sum += term;
    if (term < 1e-25L * sum) return static_cast<double>(logl(sum));
  }
  throw std::runtime_error("bessel oracle did not converge");
}

// log 1F1(alpha; beta; x) by term-by-term long double summation with a
// geometric remainder bound.
inline double log_kummer_series(double alpha, double beta, double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (long m = 0; m < 2000000; ++m) {
    term *= (alpha + m) * static_cast<long double>(x) / ((beta + m) * (m + 1.0L));
    sum += term;
    // Once the term ratio drops below 1/2 the tail is < the current term.
    const long double ratio = (alpha + m + 1.0L) * x / ((beta + m + 1.0L) * (m + 2.0L));
    if (ratio < 0.5L && term < 1e-25L * sum) return static_cast<double>(logl(sum));
  }
  throw std::runtime_error("kummer oracle did not converge");
}

// log Psi2 by brute-force double summation over an index grid, with an
// explicit check that the dropped tail is negligible.
inline double log_psi2_grid(double e_tot, double e1, double e2, double x1,
                            double x2, long grid = 200) {
  long double sum = 0.0L;
  long double last_shell = 0.0L;
  for (long m = 0; m < grid; ++m) {
    for (long n = 0; n < grid; ++n) {
      const long double lt = lgammal(e_tot + m + n) - lgammal(e_tot)
                             - (lgammal(e1 + m) - lgammal(e1))
                             - (lgammal(e2 + n) - lgammal(e2))
                             + m * logl(static_cast<long double>(x1 > 0 ? x1 : 1))
                             + n * logl(static_cast<long double>(x2 > 0 ? x2 : 1))
                             - lgammal(m + 1.0L) - lgammal(n + 1.0L);
      if ((x1 == 0 && m > 0) || (x2 == 0 && n > 0)) continue;
      const long double t = expl(lt);
      sum += t;
      if (m == grid - 1 || n == grid - 1) last_shell += t;
    }
  }
  if (last_shell > 1e-20L * sum) {
    throw std::runtime_error("psi2 oracle grid too small");
  }
  return static_cast<double>(logl(sum));
}

// Composite 30-point Gauss-Legendre over [a, b].
inline double gauss_legendre(const std::function<double(double)>& f, double a,
                             double b, int panels) {
  static const double xs[15] = {
      0.0514718425553177, 0.1538699136085835, 0.2546369261678899,
      0.3527047255308781, 0.4470337695380892, 0.5366241481420199,
      0.6205261829892429, 0.6978504947933158, 0.7677774321048262,
      0.8295657623827684, 0.8825605357920527, 0.9262000474292743,
      0.9600218649683075, 0.9836681232797472, 0.9968934840746495};
  static const double ws[15] = {
      0.1028526528935588, 0.1017623897484055, 0.0995934205867953,
      0.0963687371746443, 0.0921225222377861, 0.0868997872010830,
      0.0807558952294202, 0.0737559747377052, 0.0659742298821805,
      0.0574931562176191, 0.0484026728305941, 0.0387991925696271,
      0.0287847078833234, 0.0184664683110910, 0.0079681924961666};
  double total = 0.0;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    double acc = 0.0;
    for (int i = 0; i < 15; ++i) {
      acc += ws[i] * (f(mid - half * xs[i]) + f(mid + half * xs[i]));
    }
    total += acc * half;
  }
  return total;
}

// Integral of f over (1-hi, 1-lo) via the substitution 1-x = t^(1/e2),
// which makes the integrand smooth when f(x) ~ (1-x)^(e2-1) near 1.
// Below u_min = 1e-13, x = 1-u is too close to 1 to evaluate f in double
// precision; there the substituted integrand g(t) = h(1-u)/e2 with
// h(x) = f(x)(1-x)^(1-e2) smooth, so that sliver is added as the
// constant-limit term h(1-u_min)·t_cut/e2 (its variation over the sliver
// is far below 1e-12).
inline double integrate_right_tail(const std::function<double(double)>& f,
                                   double e2, double lo, double hi,
                                   int panels) {
  constexpr double u_min = 1e-13;
  auto g = [&](double t) {
    const double u = std::pow(t, 1.0 / e2);
    return f(1.0 - u) * std::pow(t, 1.0 / e2 - 1.0) / e2;
  };
  const double t_hi = std::pow(hi, e2);
  if (lo >= u_min) {
    return gauss_legendre(g, std::pow(lo, e2), t_hi, panels);
  }
  const double t_cut = std::pow(u_min, e2);
  const double body = gauss_legendre(g, t_cut, t_hi, panels);
  const double h_limit = f(1.0 - u_min) * std::pow(u_min, 1.0 - e2);
  return body + h_limit * t_cut / e2;
}

// Integrate f over (0,1) when f(x) ~ x^(e1-1) near 0 and (1-x)^(e2-1)
// near 1 (the beta/DNCB shape).  The substitutions x = t^(1/e1) and
// 1-x = t^(1/e2) make each half smooth, so plain Gauss-Legendre applies.
inline double integrate_01_beta_like(const std::function<double(double)>& f,
                                     double e1, double e2, int panels = 64) {
  double left;
  if (e1 < 1.0) {
    auto g = [&](double t) {
      const double x = std::pow(t, 1.0 / e1);
      return f(x) * std::pow(t, 1.0 / e1 - 1.0) / e1;
    };
    left = gauss_legendre(g, 0.0, std::pow(0.5, e1), panels);
  } else {
    left = gauss_legendre(f, 0.0, 0.5, panels);
  }
  double right;
  if (e2 < 1.0) {
    right = integrate_right_tail(f, e2, 0.0, 0.5, panels);
  } else {
    auto g = [&](double x) { return f(1.0 - x); };
    right = gauss_legendre(g, 0.0, 0.5, panels);
  }
  return left + right;
}

// Cumulative integral of a beta-like density up to `edge`, using the same
// endpoint substitutions as integrate_01_beta_like.
inline double beta_like_cdf(const std::function<double(double)>& f, double e1,
                            double e2, double edge, int panels = 64) {
  if (edge <= 0.0) return 0.0;
  if (edge >= 1.0) return integrate_01_beta_like(f, e1, e2, panels);
  if (edge <= 0.5) {
    if (e1 < 1.0) {
      auto g = [&](double t) {
        const double x = std::pow(t, 1.0 / e1);
        return f(x) * std::pow(t, 1.0 / e1 - 1.0) / e1;
      };
      return gauss_legendre(g, 0.0, std::pow(edge, e1), panels);
    }
    return gauss_legendre(f, 0.0, edge, panels);
  }
  double upper;  // integral over (edge, 1)
  if (e2 < 1.0) {
    upper = integrate_right_tail(f, e2, 0.0, 1.0 - edge, panels);
  } else {
    auto g = [&](double x) { return f(1.0 - x); };
    upper = gauss_legendre(g, 0.0, 1.0 - edge, panels);
  }
  return integrate_01_beta_like(f, e1, e2, panels) - upper;
}

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series.
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Continued fraction for Q, then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return 1.0 - q;
}

// Upper tail of the chi-squared distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) { return 1.0 - gamma_p(k / 2.0, x / 2.0); }

// Two-sided Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_p_value(double d, long n) {
  const double t = (std::sqrt(static_cast<double>(n)) + 0.12 +
                    0.11 / std::sqrt(static_cast<double>(n))) * d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    sum += 2.0 * (j % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * t * t);
  }
  return std::min(1.0, std::max(0.0, sum));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracles

#endif
