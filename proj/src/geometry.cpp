#include "bergman/geometry.hpp"

#include "bergman/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace bergman {

using json = nlohmann::json;

ManifoldModel::ManifoldModel(int k_) : k(k_), N(k_ + 1) {
  if (k < 1) throw std::invalid_argument("ManifoldModel: k must be >= 1");
}

SectionBasis build_basis(int k) {
  if (k < 1) throw std::invalid_argument("build_basis: k = 0 is excluded");
  const int n = k + 1;
  SectionBasis b;
  b.k = k;
  b.coeffs = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double log_c2 = std::log(double(k + 1)) + std::lgamma(k + 1.0) -
                    std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
    b.coeffs(j, j) = std::exp(0.5 * log_c2);
  }
  return b;
}

double area_coord(const Point& p) {
  if (p.at_infinity) return 1.0;
  double r2 = std::norm(p.z);
  return r2 / (1.0 + r2);
}

Point point_from_area_coord(double u, double theta) {
  if (u >= 1.0) return Point::infinity();
  double r = std::sqrt(u / (1.0 - u));
  return Point{std::polar(r, theta), false};
}

namespace {

// weighted monomials m_j = z^j (1+|z|^2)^{-k/2}, all entries bounded by 1
Eigen::VectorXcd weighted_monomials(int k, const Point& p) {
  const int n = k + 1;
  Eigen::VectorXcd m(n);
  if (p.at_infinity) {
    m.setZero();
    m(k) = 1.0;
    return m;
  }
  double r = std::abs(p.z);
  if (r <= 1.0) {
    double base = std::exp(-0.5 * k * std::log1p(r * r));
    Complex v = base;
    for (int j = 0; j < n; ++j) {
      m(j) = v;
      v *= p.z;
    }
  } else {
    // z^j (1+|z|^2)^{-k/2} = phase^j |w|^{k-j} (1+|w|^2)^{-k/2}, w = 1/z
    Complex w = 1.0 / p.z;
    double rw = std::abs(w);
    Complex phase = std::conj(w) / rw;
    double base = std::exp(-0.5 * k * std::log1p(rw * rw));
    Complex v = std::pow(phase, k) * base;
    for (int j = k; j >= 0; --j) {
      m(j) = v;
      v *= rw / phase;
    }
  }
  return m;
}

}  // namespace

Eigen::VectorXcd weighted_sections(const SectionBasis& basis, const Point& p) {
  return basis.coeffs * weighted_monomials(basis.k, p);
}

Complex bergman_kernel(const SectionBasis& basis, Complex z1, Complex z2) {
  const int n = basis.dim();
  Eigen::VectorXcd m1(n), m2(n);
  Complex v1 = 1.0, v2 = 1.0;
  for (int j = 0; j < n; ++j) {
    m1(j) = v1;
    m2(j) = v2;
    v1 *= z1;
    v2 *= z2;
  }
  Eigen::VectorXcd s1 = basis.coeffs * m1, s2 = basis.coeffs * m2;
  return s2.dot(s1);
}

BerezinValue berezin_rho(const SectionBasis& basis, const PointPair& pair) {
  Eigen::VectorXcd v1 = weighted_sections(basis, pair.z1);
  Eigen::VectorXcd v2 = weighted_sections(basis, pair.z2);
  double n1 = v1.squaredNorm(), n2 = v2.squaredNorm();
  double rho = std::norm(v2.dot(v1)) / (n1 * n2);
  return BerezinValue{std::clamp(rho, 0.0, 1.0)};
}

double diastasis(const SectionBasis& basis, const PointPair& pair) {
  double rho = berezin_rho(basis, pair).rho;
  // at an exactly antipodal pair the overlap is pure rounding noise
  if (rho < 1e-28)
    throw std::domain_error("diastasis: antipodal pair, rho = 0");
  return -std::log(rho) / basis.k;
}

PointPair scaled_pair(Complex z, Complex u, int k, double b) {
  if (k < 1) throw std::invalid_argument("scaled_pair: k must be >= 1");
  double bound = b * std::sqrt(std::max(std::log(double(k)), 0.0));
  if (std::abs(u) > bound && std::abs(u) > 0.0)
    throw std::invalid_argument("scaled_pair: |u| exceeds b sqrt(log k)");
  Complex z2 = z + u * (1.0 + std::norm(z)) / std::sqrt(double(k));
  if (!std::isfinite(z2.real()) || !std::isfinite(z2.imag()))
    throw std::domain_error("scaled_pair: pair leaves the chart");
  return PointPair{Point{z, false}, Point{z2, false}};
}

Eigen::MatrixXcd gram_matrix_quadrature(const SectionBasis& basis, double tol) {
  const int n = basis.dim();
  auto frob = [](const Eigen::MatrixXcd& m) { return m.norm(); };
  auto inner = [&](double theta) -> Eigen::MatrixXcd {
    auto f = [&](double u) -> Eigen::MatrixXcd {
      Eigen::VectorXcd s = weighted_sections(basis, point_from_area_coord(u, theta));
      return (s.conjugate() * s.transpose()).eval();
    };
    return quad::adaptive_generic<Eigen::MatrixXcd>(f, 0.0, 1.0, tol, frob);
  };
  Eigen::MatrixXcd g = quad::adaptive_generic<Eigen::MatrixXcd>(
      inner, 0.0, 2.0 * M_PI, tol * 2.0 * M_PI, frob);
  return g / (2.0 * M_PI);
}

SectionBasis build_basis_numerical(int k, double tol) {
  if (k < 1) throw std::invalid_argument("build_basis_numerical: k = 0 is excluded");
  SectionBasis mono;
  mono.k = k;
  mono.coeffs = Eigen::MatrixXcd::Identity(k + 1, k + 1);
  Eigen::MatrixXcd g = gram_matrix_quadrature(mono, tol);
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("build_basis_numerical: Gram not positive definite");
  Eigen::MatrixXcd L = llt.matrixL();
  SectionBasis b;
  b.k = k;
  b.coeffs = L.inverse().conjugate();
  return b;
}

std::string basis_to_json(const SectionBasis& basis) {
  json j;
  j["k"] = basis.k;
  json rows = json::array();
  for (int i = 0; i < basis.coeffs.rows(); ++i)
    for (int c = 0; c < basis.coeffs.cols(); ++c)
      rows.push_back({basis.coeffs(i, c).real(), basis.coeffs(i, c).imag()});
  j["coeffs"] = rows;
  return j.dump();
}

SectionBasis basis_from_json(const std::string& text) {
  json j = json::parse(text);
  SectionBasis b;
  b.k = j.at("k").get<int>();
  const int n = b.k + 1;
  const auto& rows = j.at("coeffs");
  if (static_cast<int>(rows.size()) != n * n)
    throw std::invalid_argument("basis_from_json: wrong coeffs length");
  b.coeffs.resize(n, n);
  for (int idx = 0; idx < n * n; ++idx)
    b.coeffs(idx / n, idx % n) = Complex(rows[idx][0].get<double>(), rows[idx][1].get<double>());
  return b;
}

}  // namespace bergman
