#ifndef DNCB_MODEL_HPP
#define DNCB_MODEL_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dncb/specfun.hpp"

namespace dncb::model {

using Matrix = Eigen::ArrayXXd;
using CountMatrix = Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Boundary clamp applied to observed values on ingestion; the density
// and the gamma split both need the open interval.
constexpr double kBoundaryClamp = 1e-6;
// Factor entries are floored here after every update so rates stay
// strictly positive.
constexpr double kPositivityFloor = 1e-300;

struct Hyperparams {
  double eps1 = 0.75;  // DNCB shape
  double eps2 = 0.75;  // DNCB shape
  double a0 = 0.1;     // theta prior shape
  double b0 = 0.1;     // theta prior rate
  double e0 = 0.1;     // phi prior shape
  double f0 = 0.1;     // phi prior rate
  int K = 1;           // component count

  void validate() const;
};

// Observed N x M matrix with values clamped into [delta, 1-delta].
struct BetaMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  long clamped_count = 0;

  long rows() const { return values.rows(); }
  long cols() const { return values.cols(); }
  void validate() const;
};

// Clamp a raw (0,1) value into the working interval; flags whether it moved.
double clamp_beta(double x, bool& clamped);

struct FactorState {
  Matrix theta1;  // N x K
  Matrix theta2;  // N x K
  Matrix phi;     // K x M

  long rows() const { return theta1.rows(); }
  long cols() const { return phi.cols(); }
  int k() const { return static_cast<int>(phi.rows()); }
  void validate() const;
};

struct RatePair {
  double lam1;
  double lam2;
  double lam_tot;
};

// Per-sample, per-component methylation summary theta1/(theta1+theta2).
struct Embedding {
  Matrix rho;  // N x K
};

// lam_r = sum_k theta_r[i,k] * phi[k,j].
RatePair rates(const FactorState& state, long i, long j);

// log DNCB(beta; e1, e2, l1, l2)
//   = log Beta(beta; e1, e2) - (l1+l2) + log Psi2[e1+e2; e1, e2; l1*beta, l2*(1-beta)].
specfun::LogReal dncb_log_pdf(double beta, double e1, double e2, double l1, double l2);

// First moment via two 1F1 evaluations.
double dncb_mean(double e1, double e2, double l1, double l2);

// (e1 + y1) / (e1 + e2 + y1 + y2).
double conditional_mean(double e1, double e2, std::int64_t y1, std::int64_t y2);

Embedding embedding(const FactorState& state);

double beta_log_pdf(double x, double a, double b);

}  // namespace dncb::model

#endif
