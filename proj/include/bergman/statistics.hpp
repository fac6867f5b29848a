#pragma once

#include "bergman/geometry.hpp"
#include "bergman/heat_sampler.hpp"
#include "bergman/matrix_metric.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace bergman {

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long n = 0;
  nlohmann::json manifest;
};

// moments & error bars -------------------------------------------------------

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
// standard error of the mean with batch-means correction for autocorrelation
double batch_means_se(const std::vector<double>& x);
// one-sample Kolmogorov distance against the standard normal
double ks_statistic_normal(std::vector<double> x);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// test functions and regions -------------------------------------------------

// rotationally symmetric test function f(z) = g(u), u = |z|^2/(1+|z|^2).
// The Laplacian and L2 norm are taken in the background metric normalized so
// the diastasis equals squared distance (total area pi); in that convention
// Delta f = 4[u(1-u) g'' + (1-2u) g'].
struct RadialFunction {
  std::string name;
  std::function<double(double)> g, gp, gpp;

  double value(const Point& p) const { return g(area_coord(p)); }
  double laplacian_u(double u) const {
    return 4.0 * (u * (1.0 - u) * gpp(u) + (1.0 - 2.0 * u) * gp(u));
  }
  double laplacian_norm_sq() const;  // ||Delta f||_2^2 by quadrature
};

// named functions: "one", "height" g = 1-u, "bump" g = u^2 (1-u)^2
RadialFunction radial_function(const std::string& name);

// u-interval times full angle: disk about 0 (u_lo = 0), annulus, hemisphere
struct SetRegion {
  double u_lo = 0.0;
  double u_hi = 0.5;

  double area() const { return 2.0 * M_PI * (u_hi - u_lo); }  // under w0
  // boundary length in the diastasis-normalized background metric
  double boundary_length() const;
  bool contains(const Point& p) const;
};

struct LinearStatistic {
  enum class Kind { smooth, set };
  Kind kind = Kind::smooth;
  RadialFunction f;
  SetRegion region;

  static LinearStatistic smooth(RadialFunction fn);
  static LinearStatistic set(SetRegion r);
};

// X(w_P): Int f w_P (smooth) or Int_U w_P (set), by adaptive quadrature of
// the exact metric density
double linear_statistic_value(const LinearStatistic& stat, const SectionBasis& basis,
                              const Eigen::MatrixXcd& rot, const Eigen::VectorXd& logw,
                              double tol = 1e-8);
double linear_statistic_value(const LinearStatistic& stat,
                              const KahlerPotentialSample& sample,
                              const SectionBasis& basis, double tol = 1e-8);

// one-point function ---------------------------------------------------------

struct FlatnessReport {
  std::vector<Point> grid;
  std::vector<EstimatorResult> offsets;  // E[phi_P - phi_I] per grid point
  double pooled_offset = 0.0;            // the z-independent c(t,k)
  double max_pairwise_z = 0.0;           // max |diff| / SE(diff) over point pairs
};

FlatnessReport one_point_flatness(const HeatParams& params, const SectionBasis& basis,
                                  const std::vector<Point>& grid, long n,
                                  const McmcOptions& opts, int chains = 2);

// two-point function ---------------------------------------------------------

struct PairSpec {
  Point z1, z2;
  double rho = 0.5;
};

struct TwoPointGrid {
  std::vector<PairSpec> pairs;  // rho strictly decreasing
};

// pairs (0, r) with r chosen so the Berezin kernel equals each rho
TwoPointGrid make_rho_grid(const SectionBasis& basis, std::vector<double> rhos);

struct TwoPointReport {
  TwoPointGrid grid;
  std::vector<EstimatorResult> covariances;
  // Cov_i - Cov_j estimated sample-by-sample (common random numbers)
  EstimatorResult difference(int i, int j) const;

  std::vector<std::vector<double>> products;  // centered products per pair
  int chains = 1;
};

TwoPointReport two_point_covariance(const HeatParams& params, const SectionBasis& basis,
                                    const TwoPointGrid& grid, long n,
                                    const McmcOptions& opts, int chains = 2);

// variance of linear statistics ---------------------------------------------

enum class EnsembleKind { heat, zeros };

struct VarianceCheck {
  EstimatorResult variance;
  double predicted = 0.0;  // k^{-1} zeta(3)/(16 pi) ||Delta f||^2
  double ratio = 0.0;
  std::vector<double> samples;  // the X_f draws (reused for normality tests)
};

VarianceCheck smooth_variance_check(int k, const RadialFunction& f, long n, uint64_t seed,
                                    EnsembleKind ensemble, double t = 0.0);

// exact finite-k variance of the zeros ensemble (dilogarithm bi-potential
// integrated against the test function); the quadrature oracle for the MC
double smooth_variance_zeros_exact(int k, const RadialFunction& f, int nodes = 120);

struct NormalityReport {
  double skew = 0.0;
  double ex_kurtosis = 0.0;
  double ks = 0.0;
  long n = 0;

  bool pass(double skew_tol = 0.1, double kurt_tol = 0.2) const {
    return std::abs(skew) < skew_tol && std::abs(ex_kurtosis) < kurt_tol;
  }
};

// standardizes the series to mean 0 / variance 1 and reports shape statistics
NormalityReport normality_test(const std::vector<double>& samples);

}  // namespace bergman
