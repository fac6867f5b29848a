#include "bergman/matrix_metric.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bergman {

using json = nlohmann::json;

namespace {

void check_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
  double dev = (m - m.adjoint()).norm();
  if (dev > tol * std::max(1.0, m.norm()))
    throw std::invalid_argument("matrix not Hermitian");
}

Eigen::VectorXd positive_log_eigs(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw std::invalid_argument("matrix not positive definite");
  return ev.array().log();
}

}  // namespace

PositiveMatrix PositiveMatrix::from_entries(const Eigen::MatrixXcd& m) {
  check_hermitian(m, 1e-12);
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::VectorXd loge = positive_log_eigs(h);
  double logdet = loge.sum();
  if (std::abs(logdet) > 1e-10 * std::max(1.0, loge.cwiseAbs().maxCoeff()) &&
      std::abs(logdet) > 1e-10)
    throw std::invalid_argument("matrix violates det = 1");
  return PositiveMatrix(std::move(h));
}

PositiveMatrix PositiveMatrix::normalized(const Eigen::MatrixXcd& m) {
  check_hermitian(m, 1e-12);
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::VectorXd loge = positive_log_eigs(h);
  double shift = loge.mean();
  return PositiveMatrix(h * std::exp(-shift));
}

PositiveMatrix PositiveMatrix::identity(int n) {
  return PositiveMatrix(Eigen::MatrixXcd::Identity(n, n));
}

Eigen::MatrixXcd PolarCoords::reconstruct() const {
  Eigen::VectorXd e = lambda.array().exp();
  return U.adjoint() * e.asDiagonal() * U;
}

Eigen::VectorXd delta_vector(int N) {
  Eigen::VectorXd d(N);
  for (int j = 0; j < N; ++j) d(j) = j - 0.5 * (N - 1);
  return d;
}

PolarCoords polar_decompose(const PositiveMatrix& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P.entries());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const int n = P.size();
  Eigen::VectorXd ev = es.eigenvalues();
  Eigen::MatrixXcd V = es.eigenvectors();
  PolarCoords pc;
  pc.lambda.resize(n);
  Eigen::MatrixXcd Vs(n, n);
  // Eigen sorts ascending; store descending, ties keeping their input order
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ev(a) > ev(b); });
  for (int i = 0; i < n; ++i) {
    pc.lambda(i) = std::log(ev(idx[i]));
    Vs.col(i) = V.col(idx[i]);
  }
  pc.lambda.array() -= pc.lambda.mean();  // exact trace-zero
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < n; ++r) {
      if (std::abs(Vs(r, i)) > 1e-14) {
        Vs.col(i) *= std::conj(Vs(r, i)) / std::abs(Vs(r, i));
        break;
      }
    }
  }
  pc.U = Vs.adjoint();
  return pc;
}

LogValue haar_volume_log_density(const Eigen::VectorXd& lambda) {
  const int n = static_cast<int>(lambda.size());
  double logd = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = std::abs(lambda(i) - lambda(j));
      if (d == 0.0) return LogValue{-std::numeric_limits<double>::infinity()};
      logd += 2.0 * (std::max(lambda(i), lambda(j)) + std::log1p(-std::exp(-d)));
    }
  return LogValue{logd};
}

double haar_volume_density(const Eigen::VectorXd& lambda) {
  return haar_volume_log_density(lambda).value();
}

KahlerPotentialSample::KahlerPotentialSample(PositiveMatrix P, int k)
    : P_(std::move(P)), k_(k) {
  if (k_ < 1) throw std::invalid_argument("KahlerPotentialSample: k must be >= 1");
  PolarCoords pc = polar_decompose(P_);
  logw_ = pc.lambda;
  U_ = pc.U;
}

namespace {

struct ChartRep {
  Complex zeta;      // |zeta| <= 1
  bool flipped;
};

ChartRep chart_of(const Point& p) {
  if (p.at_infinity) return {Complex(0, 0), true};
  if (std::abs(p.z) > 1.0) return {1.0 / p.z, true};
  return {p.z, false};
}

// section polynomial coefficients in the evaluation chart:
// main chart  g(zeta) = A m(zeta) with A = rot * coeffs;
// flipped     g(zeta) = A J m(zeta), J the index reversal
Eigen::MatrixXcd chart_poly_coeffs(const SectionBasis& basis, const Eigen::MatrixXcd& rot,
                                   bool flipped) {
  Eigen::MatrixXcd A = rot * basis.coeffs;
  if (flipped) return A.rowwise().reverse();
  return A;
}

void eval_poly_and_deriv(const Eigen::MatrixXcd& A, Complex zeta,
                         Eigen::VectorXcd& g, Eigen::VectorXcd& gp) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXcd m(n), mp(n);
  Complex v = 1.0;
  for (int j = 0; j < n; ++j) {
    m(j) = v;
    v *= zeta;
  }
  mp(0) = 0.0;
  for (int j = 1; j < n; ++j) mp(j) = double(j) * m(j - 1);
  g = A * m;
  gp = A * mp;
}

}  // namespace

double metric_density_invariant(const SectionBasis& basis, const Eigen::MatrixXcd& rot,
                                const Eigen::VectorXd& logw, const Point& p) {
  ChartRep ch = chart_of(p);
  Eigen::MatrixXcd A = chart_poly_coeffs(basis, rot, ch.flipped);
  Eigen::VectorXcd g, gp;
  eval_poly_and_deriv(A, ch.zeta, g, gp);
  double wmax = logw.maxCoeff();
  double Q = 0.0, T = 0.0;
  Complex S = 0.0;
  for (int j = 0; j < logw.size(); ++j) {
    double w = std::exp(logw(j) - wmax);
    Q += w * std::norm(g(j));
    S += w * std::conj(g(j)) * gp(j);
    T += w * std::norm(gp(j));
  }
  if (Q <= 0.0) throw std::domain_error("metric density: degenerate section values");
  double chart_density = (Q * T - std::norm(S)) / (basis.k * Q * Q);
  double lam0 = 1.0 / std::pow(1.0 + std::norm(ch.zeta), 2);  // background in this chart
  return chart_density / lam0;
}

double metric_density_invariant(const KahlerPotentialSample& sample,
                                const SectionBasis& basis, const Point& p) {
  if (basis.k != sample.k()) throw std::invalid_argument("basis/sample k mismatch");
  return metric_density_invariant(basis, sample.rotation(), sample.log_weights(), p);
}

double metric_density(const KahlerPotentialSample& sample, const SectionBasis& basis,
                      const Point& p) {
  double inv = metric_density_invariant(sample, basis, p);
  double r2 = p.at_infinity ? 0.0 : std::norm(p.z);   // at infinity: flipped chart
  if (!p.at_infinity && std::abs(p.z) > 1.0) r2 = std::norm(1.0 / p.z);
  return inv / std::pow(1.0 + r2, 2);
}

double relative_potential_polar(const SectionBasis& basis, const Eigen::MatrixXcd& rot,
                                const Eigen::VectorXd& logw, const Point& p) {
  Eigen::VectorXcd v = weighted_sections(basis, p);
  Eigen::VectorXcd w = rot * v;
  double m = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd terms(logw.size());
  for (int j = 0; j < logw.size(); ++j) {
    double a = std::norm(w(j));
    terms(j) = (a == 0.0) ? -std::numeric_limits<double>::infinity()
                          : logw(j) + std::log(a);
    m = std::max(m, terms(j));
  }
  double s = 0.0;
  for (int j = 0; j < logw.size(); ++j) s += std::exp(terms(j) - m);
  double log_num = m + std::log(s);
  return (log_num - std::log(v.squaredNorm())) / basis.k;
}

namespace {

uint64_t point_key(const Point& p) {
  uint64_t re, im;
  double zr = p.z.real(), zi = p.z.imag();
  std::memcpy(&re, &zr, sizeof(re));
  std::memcpy(&im, &zi, sizeof(im));
  uint64_t h = re * 0x9e3779b97f4a7c15ULL ^ (im + 0xbf58476d1ce4e5b9ULL);
  return p.at_infinity ? ~h : h;
}

}  // namespace

double relative_potential(const KahlerPotentialSample& sample, const SectionBasis& basis,
                          const Point& p) {
  if (basis.k != sample.k()) throw std::invalid_argument("basis/sample k mismatch");
  uint64_t key = point_key(p);
  if (auto it = sample.cache.find(key); it != sample.cache.end()) return it->second;
  double v = relative_potential_polar(basis, sample.rotation(), sample.log_weights(), p);
  sample.cache.emplace(key, v);
  return v;
}

double kahler_potential(const KahlerPotentialSample& sample, const SectionBasis& basis,
                        const Point& p) {
  ChartRep ch = chart_of(p);
  // phi in the evaluation chart: relative part + background chart potential
  double phi_I = std::log(double(basis.k + 1)) / basis.k + std::log1p(std::norm(ch.zeta));
  return relative_potential(sample, basis, p) + phi_I;
}

std::string matrix_to_json(const PositiveMatrix& P) {
  json j;
  const int n = P.size();
  j["N"] = n;
  json e = json::array();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      e.push_back({P.entries()(r, c).real(), P.entries()(r, c).imag()});
  j["entries"] = e;
  return j.dump();
}

PositiveMatrix matrix_from_json(const std::string& text) {
  json j = json::parse(text);
  const int n = j.at("N").get<int>();
  const auto& e = j.at("entries");
  if (static_cast<int>(e.size()) != n * n)
    throw std::invalid_argument("matrix_from_json: wrong entries length");
  Eigen::MatrixXcd m(n, n);
  for (int idx = 0; idx < n * n; ++idx)
    m(idx / n, idx % n) = Complex(e[idx][0].get<double>(), e[idx][1].get<double>());
  return PositiveMatrix::from_entries(m);
}

}  // namespace bergman
