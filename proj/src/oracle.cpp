#include "bergman/oracle.hpp"

#include "bergman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bergman::oracle {

namespace {

double log_sinh(double lam) {  // lam > 0
  return lam - M_LN2 + std::log1p(-std::exp(-2.0 * lam));
}

}  // namespace

double bipotential_amplitude(double lam, double rho) {
  lam = std::abs(lam);
  if (lam == 0.0) return 0.0;
  double ls = log_sinh(lam);
  double inv_s2 = std::exp(-2.0 * ls);
  double q = (1.0 - rho) + inv_s2;
  double sq = std::sqrt(q);
  return 2.0 / sq * (std::log(sq + std::sqrt(1.0 - rho)) + ls);
}

double bipotential_amplitude_delta(double lam, double rho) {
  // A(lam,rho) - 2 lam tanh(lam), with the cancellation done algebraically
  lam = std::abs(lam);
  if (lam == 0.0) return 0.0;
  double ls = log_sinh(lam);
  double inv_s2 = std::exp(-2.0 * ls);
  double q = (1.0 - rho) + inv_s2;
  double sq = std::sqrt(q);
  double sr = std::sqrt(1.0 - rho);
  double c = 1.0 / std::tanh(lam);
  double g1 = (1.0 / (sq + c) + 1.0 / (1.0 + sr)) / (c + 1.0);
  return 2.0 * (std::log1p(-rho * g1) / sq + lam * rho / ((sq + c) * c * sq));
}

namespace {

// E_{lam ~ N(t,t)}[f(|lam|)] as a folded integral on [0, inf)
quad::QuadResult gaussian_mean(double t, const std::function<double(double)>& f,
                               double tol) {
  const double sd = std::sqrt(t);
  const double hi = t + 14.0 * sd + 10.0;
  auto integrand = [&](double lam) {
    double d1 = (lam - t) / sd, d2 = (lam + t) / sd;
    double w = std::exp(-0.5 * d1 * d1) + std::exp(-0.5 * d2 * d2);
    return w * f(lam) / (sd * std::sqrt(2.0 * M_PI));
  };
  return quad::adaptive_gk(integrand, 0.0, hi, tol, 1e-13, 8000);
}

}  // namespace

QuadratureReport d_rho_bipotential(const BiPotentialQuery& query) {
  const double t = query.t, rho = query.rho;
  if (!(t > 0.0) || !(rho > 0.0) || !(rho < 1.0))
    throw std::invalid_argument("d_rho_bipotential: need t > 0 and 0 < rho < 1");
  QuadratureReport rep;
  const double sr = std::sqrt(1.0 - rho);
  // the direct form subtracts two O(t/rho) quantities; past moderate t the
  // analytically cancelled (expanded) form is the accurate route
  if (rho < query.rho_switch || t > 20.0) {
    auto r = gaussian_mean(t, [&](double l) { return bipotential_amplitude_delta(l, rho); },
                           query.tolerance * rho / std::max(sr, 0.5));
    rep.value = 2.0 * t / (1.0 + sr) - sr / rho * r.value;
    rep.abs_error_estimate = sr / rho * r.abs_err;
    rep.evaluations = r.evals;
  } else {
    auto r = gaussian_mean(t, [&](double l) { return bipotential_amplitude(l, rho); },
                           query.tolerance * rho);
    rep.value = 2.0 * t / rho - sr / rho * r.value;
    rep.abs_error_estimate = sr / rho * r.abs_err;
    rep.evaluations = r.evals;
  }
  double floor = 1e-13 * (1.0 + 2.0 * t / rho);
  if (rep.abs_error_estimate > 4.0 * std::max(query.tolerance, floor))
    throw ToleranceError("d_rho_bipotential: tolerance unreachable", rep);
  return rep;
}

QuadratureReport bipotential_integral(double t, double rho_lo, double rho_hi,
                                      double tolerance) {
  if (!(rho_lo < rho_hi)) throw std::invalid_argument("bipotential_integral: rho_lo < rho_hi");
  long evals = 0;
  auto f = [&](double r) {
    BiPotentialQuery q;
    q.t = t;
    q.rho = r;
    q.tolerance = tolerance * 0.05;
    auto rep = d_rho_bipotential(q);
    evals += rep.evaluations;
    return rep.value;
  };
  auto r = quad::adaptive_gk(f, rho_lo, rho_hi, tolerance, 1e-12, 400);
  return QuadratureReport{r.value, r.abs_err, evals};
}

QuadratureReport small_rho_integral(double t, double tolerance) {
  if (!(t > 0.0)) throw std::invalid_argument("small_rho_integral: t > 0");
  auto r = gaussian_mean(t, [](double l) { return 2.0 * l * std::tanh(l); }, tolerance);
  QuadratureReport rep{r.value, r.abs_err, r.evals};
  if (!r.converged) throw ToleranceError("small_rho_integral: tolerance unreachable", rep);
  return rep;
}

double dilog(double rho) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("dilog: rho in [0,1]");
  const double pi2_6 = M_PI * M_PI / 6.0;
  if (rho == 0.0) return 0.0;
  if (rho == 1.0) return pi2_6;
  if (rho > 0.5)
    return pi2_6 - std::log(rho) * std::log1p(-rho) - dilog(1.0 - rho);
  double sum = 0.0, p = rho;
  for (int n = 1; n < 200; ++n) {
    double term = p / (double(n) * n);
    sum += term;
    if (term < 1e-18 * sum) break;
    p *= rho;
  }
  return sum;
}

namespace {

// leading divided differences of f(x) = e^{c x} over (sorted, possibly
// repeated) nodes; repeated nodes use f^{(m)}(x)/m! = c^m e^{c x}/m!
Eigen::VectorXcd exp_divided_differences(const Eigen::VectorXd& nodes, double c) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> tab(n);
  Eigen::VectorXcd lead(n);
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) col[i] = std::exp(c * nodes(i));
  lead(0) = col[0];
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i + m < n; ++i) {
      double span = nodes(i + m) - nodes(i);
      if (span == 0.0) {
        double v = std::exp(c * nodes(i));
        for (int p = 1; p <= m; ++p) v *= c / p;
        col[i] = v;
      } else {
        col[i] = (col[i + 1] - col[i]) / span;
      }
    }
    lead(m) = col[0];
  }
  return lead;
}

double vandermonde(const Eigen::VectorXd& v) {
  double p = 1.0;
  for (int i = 0; i < v.size(); ++i)
    for (int j = i + 1; j < v.size(); ++j) p *= v(j) - v(i);
  return p;
}

bool has_cluster(const Eigen::VectorXd& sorted, double tol) {
  for (int i = 0; i + 1 < sorted.size(); ++i)
    if (sorted(i + 1) - sorted(i) < tol) return true;
  return false;
}

}  // namespace

double hciz(Eigen::VectorXd a, Eigen::VectorXd b, double mu, double confluence_tol) {
  const int n = static_cast<int>(a.size());
  if (b.size() != n) throw std::invalid_argument("hciz: size mismatch");
  if (n == 1) return std::exp(mu * a(0) * b(0));
  if (mu == 0.0) return 1.0;

  std::sort(a.data(), a.data() + n);
  std::sort(b.data(), b.data() + n);
  double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
  double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (has_cluster(b, confluence_tol * scale_b)) {
    if (has_cluster(a, confluence_tol * scale_a))
      throw std::runtime_error("hciz: coincident eigenvalues on both sides unsupported");
    std::swap(a, b);
    std::swap(scale_a, scale_b);
  }
  // snap near-coincident a-nodes so the confluent branch is taken exactly
  for (int i = 0; i + 1 < n; ++i)
    if (a(i + 1) - a(i) < confluence_tol * scale_a) a(i + 1) = a(i);

  Eigen::MatrixXd D(n, n);
  for (int l = 0; l < n; ++l)
    D.col(l) = exp_divided_differences(a, mu * b(l)).real();
  double det = Eigen::FullPivLU<Eigen::MatrixXd>(D).determinant();

  double pref = 1.0;
  for (int p = 1; p < n; ++p) pref *= std::tgamma(p + 1.0);
  return pref * std::pow(mu, -0.5 * n * (n - 1)) * det / vandermonde(b);
}

std::pair<double, double> gaussian_vandermonde_identity(const Eigen::VectorXd& mu, double t) {
  const int n = static_cast<int>(mu.size());
  if (n < 1 || n > 4) throw std::invalid_argument("identity: N in 1..4 for the quadrature side");
  if (!(t > 0.0)) throw std::invalid_argument("identity: t > 0");
  std::vector<double> x, w;
  quad::gauss_hermite(16, x, w);
  const int m = static_cast<int>(x.size());
  const double s = 2.0 * std::sqrt(t);

  double sum = 0.0;
  std::vector<int> idx(n, 0);
  Eigen::VectorXd lam(n);
  while (true) {
    double wt = 1.0;
    for (int j = 0; j < n; ++j) {
      lam(j) = 2.0 * t * mu(j) + s * x[idx[j]];
      wt *= w[idx[j]];
    }
    sum += wt * vandermonde(lam);
    int j = 0;
    for (; j < n; ++j) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
    if (j == n) break;
  }
  double lhs = std::exp(t * mu.squaredNorm()) * std::pow(s, n) * sum;
  double rhs = std::pow(2.0 * M_PI, 0.5 * n) * std::pow(2.0 * t, 0.5 * n * n) *
               vandermonde(mu) * std::exp(t * mu.squaredNorm());
  return {lhs, rhs};
}

double energy_entropy_exponent(const Eigen::VectorXd& lambda, double t, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k + 1 != n) throw std::invalid_argument("energy_entropy_exponent: need dim = k+1");
  if (!(t > 0.0)) throw std::invalid_argument("energy_entropy_exponent: t > 0");
  double s_log = 0.0, s_exp = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = std::abs(lambda(i) - lambda(j));
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      s_log += std::log(d);
      s_exp += std::max(lambda(i), lambda(j)) + std::log1p(-std::exp(-d));
    }
  // (N^2/2) * [ (2/N^2) s_log + (2/N^2) s_exp - (1/2t)(1/N) sum lam^2 ]
  return s_log + s_exp - n * lambda.squaredNorm() / (4.0 * t);
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("riemann_zeta: s > 1");
  const int M = 2000;
  double sum = 0.0;
  for (int n = 1; n < M; ++n) sum += std::pow(n, -s);
  double m = M;
  sum += std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s) +
         s * std::pow(m, -s - 1.0) / 12.0 -
         s * (s + 1.0) * (s + 2.0) * std::pow(m, -s - 3.0) / 720.0;
  return sum;
}

}  // namespace bergman::oracle
