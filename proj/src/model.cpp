#include "dncb/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dncb::model {

void Hyperparams::validate() const {
  if (!(eps1 > 0.0) || !(eps2 > 0.0) || !(a0 > 0.0) || !(b0 > 0.0) ||
      !(e0 > 0.0) || !(f0 > 0.0)) {
    throw std::domain_error("Hyperparams: all shape/rate parameters must be > 0");
  }
  if (K < 1) throw std::domain_error("Hyperparams: K must be >= 1");
}

void BetaMatrix::validate() const {
  if (rows() < 1 || cols() < 1) {
    throw std::domain_error("BetaMatrix: empty matrix");
  }
  if (row_ids.size() != static_cast<std::size_t>(rows()) ||
      col_ids.size() != static_cast<std::size_t>(cols())) {
    throw std::domain_error("BetaMatrix: label counts do not match dimensions");
  }
  if ((values < kBoundaryClamp).any() || (values > 1.0 - kBoundaryClamp).any()) {
    throw std::domain_error("BetaMatrix: values outside the clamped interval");
  }
}

double clamp_beta(double x, bool& clamped) {
  clamped = false;
  if (x < kBoundaryClamp) {
    clamped = x != kBoundaryClamp;
    return kBoundaryClamp;
  }
  if (x > 1.0 - kBoundaryClamp) {
    clamped = true;
    return 1.0 - kBoundaryClamp;
  }
  return x;
}

void FactorState::validate() const {
  if (theta1.rows() != theta2.rows() || theta1.cols() != theta2.cols() ||
      theta1.cols() != phi.rows()) {
    throw std::domain_error("FactorState: inconsistent dimensions");
  }
  if ((theta1 <= 0.0).any() || (theta2 <= 0.0).any() || (phi <= 0.0).any()) {
    throw std::domain_error("FactorState: factors must be strictly positive");
  }
}

RatePair rates(const FactorState& state, long i, long j) {
  if (i < 0 || i >= state.rows() || j < 0 || j >= state.cols()) {
    throw std::out_of_range("rates: index out of range");
  }
  const double lam1 = (state.theta1.row(i) * state.phi.col(j).transpose()).sum();
  const double lam2 = (state.theta2.row(i) * state.phi.col(j).transpose()).sum();
  return {lam1, lam2, lam1 + lam2};
}

double beta_log_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x)
         + std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

specfun::LogReal dncb_log_pdf(double beta, double e1, double e2, double l1,
                              double l2) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::domain_error("dncb_log_pdf: beta must lie strictly in (0,1)");
  }
  if (!(e1 > 0.0) || !(e2 > 0.0) || !(l1 >= 0.0) || !(l2 >= 0.0)) {
    throw std::domain_error("dncb_log_pdf: invalid parameters");
  }
  const double log_psi2 =
      specfun::log_humbert_psi2(e1 + e2, e1, e2, l1 * beta, l2 * (1.0 - beta))
          .value;
  return specfun::LogReal(beta_log_pdf(beta, e1, e2) - (l1 + l2) + log_psi2);
}

double dncb_mean(double e1, double e2, double l1, double l2) {
  if (!(e1 > 0.0) || !(e2 > 0.0) || !(l1 >= 0.0) || !(l2 >= 0.0)) {
    throw std::domain_error("dncb_mean: invalid parameters");
  }
  const double et = e1 + e2;
  const double lt = l1 + l2;
  if (lt == 0.0) return e1 / et;
  // Combined in log space; the e^{lt} prefactor would otherwise overflow.
  const double log_f1 = specfun::kummer_1f1(et, et + 1.0, lt).value;
  const double log_f2 = specfun::kummer_1f1(et + 1.0, et + 2.0, lt).value;
  const double term1 = std::exp(std::log(e1 / et) + log_f1 - lt);
  const double term2 =
      l1 > 0.0 ? std::exp(std::log(l1 / (et + 1.0)) + log_f2 - lt) : 0.0;
  return term1 + term2;
}

double conditional_mean(double e1, double e2, std::int64_t y1, std::int64_t y2) {
  if (!(e1 > 0.0) || !(e2 > 0.0) || y1 < 0 || y2 < 0) {
    throw std::domain_error("conditional_mean: invalid parameters");
  }
  return (e1 + static_cast<double>(y1)) /
         (e1 + e2 + static_cast<double>(y1 + y2));
}

Embedding embedding(const FactorState& state) {
  state.validate();
  Embedding e;
  e.rho = state.theta1 / (state.theta1 + state.theta2);
  return e;
}

}  // namespace dncb::model
