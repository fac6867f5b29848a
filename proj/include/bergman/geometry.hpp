#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace bergman {

using Complex = std::complex<double>;

// A point on CP^1 in the affine chart, with an explicit flag for the point
// at infinity. All kernel evaluations internally switch to the flipped chart
// w = 1/z when |z| > 1, so large coordinates stay well conditioned.
struct Point {
  Complex z{0.0, 0.0};
  bool at_infinity = false;

  static Point infinity() { return Point{{0.0, 0.0}, true}; }
};

struct PointPair {
  Point z1, z2;
};

// Tensor power k of O(1) on CP^1 with the round background of total area 2*pi.
struct ManifoldModel {
  int k = 1;
  int N = 2;              // dim H^0 = k+1
  double area = 2.0 * M_PI;

  explicit ManifoldModel(int k_);
};

// Orthonormal basis of H^0(CP^1, O(k)) under the Fubini-Study inner product
// (1/2pi) Int conj(s_i) s_j (1+|z|^2)^{-k} w0. Row i of coeffs maps monomials
// z^j to the section s_i(z) = sum_j coeffs(i,j) z^j.
struct SectionBasis {
  int k = 0;
  Eigen::MatrixXcd coeffs;

  int dim() const { return k + 1; }
};

struct BerezinValue {
  double rho = 1.0;
};

// Closed-form orthonormal basis: s_j = c_j z^j, c_j^2 = (k+1) * binom(k,j).
// Rejects k = 0.
SectionBasis build_basis(int k);

// area coordinate u = |z|^2/(1+|z|^2) in [0,1]; the background form is
// w0 = du ^ dtheta (total mass 2*pi)
double area_coord(const Point& p);
Point point_from_area_coord(double u, double theta);

// h^{k/2}-weighted section values, bounded for any |z| (flipped chart beyond
// the unit circle). Entry i is s_i(z) (1+|z|^2)^{-k/2} up to a unit phase
// convention at infinity.
Eigen::VectorXcd weighted_sections(const SectionBasis& basis, const Point& p);

// Raw Bergman kernel B_k(z1,z2) = sum_j s_j(z1) conj(s_j(z2)); finite points.
Complex bergman_kernel(const SectionBasis& basis, Complex z1, Complex z2);

// Berezin kernel rho = |B(z1,z2)|^2 / (B(z1,z1) B(z2,z2)) in [0,1].
BerezinValue berezin_rho(const SectionBasis& basis, const PointPair& pair);

// Calabi diastasis D(z1,z2) = -(1/k) log rho; throws on antipodal pairs.
double diastasis(const SectionBasis& basis, const PointPair& pair);

// Near-diagonal pair (z, z + u / sqrt(k * lam(z))) with lam(z) = (1+|z|^2)^{-2},
// normalized so rho -> e^{-|u|^2} as k grows. Enforces |u| <= b sqrt(log k).
PointPair scaled_pair(Complex z, Complex u, int k, double b = 3.0);

// Numerical Gram matrix of the basis sections by adaptive 2-D quadrature
// (the independent oracle for orthonormality).
Eigen::MatrixXcd gram_matrix_quadrature(const SectionBasis& basis, double tol = 1e-12);

// Orthonormalize raw monomials by quadrature Gram + Cholesky; the numerical
// counterpart of build_basis.
SectionBasis build_basis_numerical(int k, double tol = 1e-12);

std::string basis_to_json(const SectionBasis& basis);
SectionBasis basis_from_json(const std::string& text);

}  // namespace bergman
