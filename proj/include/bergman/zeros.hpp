#pragma once

#include "bergman/geometry.hpp"
#include "bergman/rng.hpp"
#include "bergman/statistics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bergman {

// Initial data (Lambda, U) of a Bergman geodesic ray; lambda descending with
// zero sum, exactly the PolarCoords layout.
struct RayDirection {
  Eigen::VectorXd lambda;
  Eigen::MatrixXcd U;

  // multiplicity of lambda_max (ties within tol)
  int top_multiplicity(double tol = 1e-12) const;
};

// ray potential beta_s(z) = (1/k) log sum_j e^{s lambda_j} |s^U_j(z)|^2,
// log-domain (max-shifted); value taken in the point's chart like
// kahler_potential
double ray_potential(const RayDirection& ray, double s, const SectionBasis& basis,
                     const Point& p);
// beta_s - phi_I, chart independent
double ray_relative_potential(const RayDirection& ray, double s, const SectionBasis& basis,
                              const Point& p);

// L^1(M, w0) distance between (1/k) log F_s and its s -> infinity limit
// (1/k) log sum_{top} |s^U_j|^2; nonincreasing in s and -> 0
std::vector<double> l1_convergence(const RayDirection& ray, const SectionBasis& basis,
                                   const std::vector<double>& times, double tol = 1e-7);

// | Int psi w_{beta_s} - (2pi/k) sum_{roots of s^U_max} psi(root) |; the
// (2pi/k) zero-pairing normalization is fixed by the psi = 1 class constraint
double weak_limit_check(const RayDirection& ray, const SectionBasis& basis,
                        const RadialFunction& psi, double s, double tol = 1e-6);

// Gaussian random section s = sum_j c_j s_j, c_j iid standard complex normal
struct GaussianSection {
  int k = 1;
  Eigen::VectorXcd c;
};

GaussianSection sample_section(int k, std::mt19937_64& rng);

struct ZeroSet {
  std::vector<Point> roots;  // exactly k entries counting infinity

  long count_in(const SetRegion& region) const;
};

// roots of the degree-k polynomial by balanced companion eigenvalues, one
// Newton polish per finite root, degree deficit mapped to roots at infinity;
// enforces the weighted residual |p(root)| < 1e-8 * scale
ZeroSet zeros_of(const GaussianSection& section, const SectionBasis& basis);

struct NumberVarianceResult {
  EstimatorResult variance;
  double predicted = 0.0;  // sqrt(k) nu1 Vol1(boundary)
  double mean_count = 0.0;
};

NumberVarianceResult number_variance(int k, const SetRegion& region, long n, uint64_t seed);

// zeta(3/2) / (8 pi^{3/2})
double nu1_constant();

struct DensityBin {
  double expected = 0.0;   // k/8 per section
  double mean = 0.0;
  double std_error = 0.0;
};

// mean root counts over the 8-cell equal-area partition (u half x theta quadrant)
std::vector<DensityBin> zero_density_bins(int k, long n, uint64_t seed);

}  // namespace bergman
