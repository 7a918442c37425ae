#ifndef DNCB_SPECFUN_HPP
#define DNCB_SPECFUN_HPP

#include <limits>
#include <stdexcept>

namespace dncb::specfun {

// Natural log of a non-negative quantity.  -inf encodes log(0); NaN is
// never produced on the valid domain.
struct LogReal {
  double value = -std::numeric_limits<double>::infinity();

  LogReal() = default;
  explicit LogReal(double log_value) : value(log_value) {}

  static LogReal zero() { return LogReal(); }
  static LogReal one() { return LogReal(0.0); }

  bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log(e^a + e^b), safe for -inf operands.
double log_add(double a, double b);

// log I_v(a), order v > -1, argument a >= 0.  Power series for moderate
// arguments, Hankel asymptotic expansion for large ones; no overflow for
// a up to at least 1e6.
LogReal log_bessel_i(double v, double a);

// log 1F1(alpha; beta; x) for alpha, beta > 0 and x >= 0.
LogReal kummer_1f1(double alpha, double beta, double x);

// log Psi2[e_tot; e1, e2; x1, x2], the two-argument confluent
// hypergeometric series, for positive shapes and x1, x2 >= 0.
// Symmetric under (e1,x1) <-> (e2,x2).
LogReal log_humbert_psi2(double e_tot, double e1, double e2, double x1, double x2);

}  // namespace dncb::specfun

#endif
