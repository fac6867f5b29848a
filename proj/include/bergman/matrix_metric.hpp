#pragma once

#include "bergman/geometry.hpp"

#include <Eigen/Dense>

#include <string>
#include <unordered_map>

namespace bergman {

struct LogValue {
  double log_value = 0.0;
  double value() const { return std::exp(log_value); }
};

// Positive definite Hermitian matrix with det = 1 (the random variable of the
// whole theory). The strict constructor rejects violations; `normalized`
// projects det to 1 by rescaling.
class PositiveMatrix {
 public:
  static PositiveMatrix from_entries(const Eigen::MatrixXcd& m);  // validates
  static PositiveMatrix normalized(const Eigen::MatrixXcd& m);    // projects det

  const Eigen::MatrixXcd& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }

  static PositiveMatrix identity(int n);

 private:
  explicit PositiveMatrix(Eigen::MatrixXcd m) : entries_(std::move(m)) {}
  Eigen::MatrixXcd entries_;
};

// Polar coordinates P = U^dag e^Lambda U; lambda descending, sum zero.
struct PolarCoords {
  Eigen::VectorXd lambda;
  Eigen::MatrixXcd U;

  Eigen::MatrixXcd reconstruct() const;
};

// half sum of positive roots, ascending: (-(N-1)/2, ..., (N-1)/2)
Eigen::VectorXd delta_vector(int N);

// Deterministic eigen-decomposition of log P (descending lambda; first
// nonzero component of each eigenvector made real positive).
PolarCoords polar_decompose(const PositiveMatrix& P);

// radial density of Haar volume: Delta^2(e^lambda); log form and linear form
LogValue haar_volume_log_density(const Eigen::VectorXd& lambda);
double haar_volume_density(const Eigen::VectorXd& lambda);

struct KahlerPotentialSample {
  KahlerPotentialSample(PositiveMatrix P, int k);

  const PositiveMatrix& P() const { return P_; }
  int k() const { return k_; }
  const Eigen::VectorXd& log_weights() const { return logw_; }
  const Eigen::MatrixXcd& rotation() const { return U_; }

  mutable std::unordered_map<uint64_t, double> cache;

 private:
  PositiveMatrix P_;
  int k_;
  Eigen::VectorXd logw_;   // eigenvalue logs of P (descending)
  Eigen::MatrixXcd U_;     // P = U^dag e^Lambda U
};

// phi_P(z) = (1/k) log(conj(s)^T P s); at |z| > 1 and at infinity the value
// is taken in the flipped chart.
double kahler_potential(const KahlerPotentialSample& sample, const SectionBasis& basis,
                        const Point& p);

// phi_P - phi_I, chart independent and bounded on all of CP^1
double relative_potential(const KahlerPotentialSample& sample, const SectionBasis& basis,
                          const Point& p);

// Metric evaluators for w_P = (1/k) i ddbar log( s^dag U^dag e^Lam U s ),
// given directly in polar data so that huge e^{lambda} never materializes.
// `metric_density_invariant` returns w_P / w0; `metric_density` the chart
// density (coefficient of i dz^dbar z in the point's chart).
double metric_density_invariant(const SectionBasis& basis, const Eigen::MatrixXcd& rot,
                                const Eigen::VectorXd& logw, const Point& p);
double metric_density_invariant(const KahlerPotentialSample& sample,
                                const SectionBasis& basis, const Point& p);
double metric_density(const KahlerPotentialSample& sample, const SectionBasis& basis,
                      const Point& p);

// relative potential from polar data: (1/k)[log sum_j e^{lw_j}|(U shat)_j|^2 - log |shat|^2]
double relative_potential_polar(const SectionBasis& basis, const Eigen::MatrixXcd& rot,
                                const Eigen::VectorXd& logw, const Point& p);

std::string matrix_to_json(const PositiveMatrix& P);
PositiveMatrix matrix_from_json(const std::string& text);

}  // namespace bergman
