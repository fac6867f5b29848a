#include "bergman/zeros.hpp"

#include "bergman/matrix_metric.hpp"
#include "bergman/oracle.hpp"
#include "bergman/parallel.hpp"
#include "bergman/quadrature.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bergman {

int RayDirection::top_multiplicity(double tol) const {
  double top = lambda.maxCoeff();
  int r = 0;
  for (int i = 0; i < lambda.size(); ++i)
    if (top - lambda(i) <= tol) ++r;
  return r;
}

double ray_relative_potential(const RayDirection& ray, double s, const SectionBasis& basis,
                              const Point& p) {
  return relative_potential_polar(basis, ray.U, s * ray.lambda, p);
}

double ray_potential(const RayDirection& ray, double s, const SectionBasis& basis,
                     const Point& p) {
  if (s < 0.0) throw std::invalid_argument("ray_potential: s >= 0");
  double r2 = p.at_infinity ? 0.0 : std::norm(p.z);
  if (!p.at_infinity && std::abs(p.z) > 1.0) r2 = std::norm(1.0 / p.z);
  double phi_I = std::log(double(basis.k + 1)) / basis.k + std::log1p(r2);
  return ray_relative_potential(ray, s, basis, p) + phi_I;
}

namespace {

// (1/k)[log F_s - log(top group)] at one point; nonnegative
double log_tail_excess(const RayDirection& ray, double s, const SectionBasis& basis,
                       const Point& p, int top_count) {
  Eigen::VectorXcd v = weighted_sections(basis, p);
  Eigen::VectorXcd w = ray.U * v;
  double lmax = ray.lambda.maxCoeff();
  double top = 0.0, rest = 0.0;
  for (int j = 0; j < ray.lambda.size(); ++j) {
    double a = std::norm(w(j));
    if (j < top_count) top += a;
    else rest += std::exp(s * (ray.lambda(j) - lmax)) * a;
  }
  if (top <= 0.0) top = std::numeric_limits<double>::min();
  return std::log1p(rest / top) / basis.k;
}

}  // namespace

std::vector<double> l1_convergence(const RayDirection& ray, const SectionBasis& basis,
                                   const std::vector<double>& times, double tol) {
  const int r = ray.top_multiplicity();
  std::vector<double> out;
  out.reserve(times.size());
  for (double s : times) {
    if (s < 0.0) throw std::invalid_argument("l1_convergence: times must be >= 0");
    auto res = quad::integrate_rect(
        [&](double u, double th) {
          return log_tail_excess(ray, s, basis, point_from_area_coord(u, th), r);
        },
        tol, 20000);
    out.push_back(res.value);
  }
  return out;
}

double weak_limit_check(const RayDirection& ray, const SectionBasis& basis,
                        const RadialFunction& psi, double s, double tol) {
  // metric side integrated by parts: Int psi w0 + (1/4) II L_psi(u) (beta_s - phi_I)
  auto bg = quad::adaptive_gk([&](double u) { return psi.g(u); }, 0.0, 1.0, tol * 0.1, 1e-12);
  double metric_side = 2.0 * M_PI * bg.value;
  auto corr = quad::integrate_rect(
      [&](double u, double th) {
        return 0.25 * psi.laplacian_u(u) *
               ray_relative_potential(ray, s, basis, point_from_area_coord(u, th));
      },
      tol, 20000);
  metric_side += corr.value;

  int jmax = 0;
  ray.lambda.maxCoeff(&jmax);
  GaussianSection top;
  top.k = basis.k;
  top.c = ray.U.row(jmax).transpose();
  ZeroSet zs = zeros_of(top, basis);
  double zero_side = 0.0;
  for (const auto& root : zs.roots) zero_side += psi.value(root);
  zero_side *= 2.0 * M_PI / basis.k;
  return std::abs(metric_side - zero_side);
}

GaussianSection sample_section(int k, std::mt19937_64& rng) {
  GaussianSection s;
  s.k = k;
  s.c.resize(k + 1);
  for (int j = 0; j <= k; ++j) s.c(j) = complex_gaussian(rng);
  return s;
}

long ZeroSet::count_in(const SetRegion& region) const {
  long c = 0;
  for (const auto& r : roots)
    if (region.contains(r)) ++c;
  return c;
}

namespace {

// eigenvalues of the companion matrix: LAPACK balancing followed by
// Hessenberg QR (zgebal's scaling keeps the Hessenberg form)
Eigen::VectorXcd companion_eigenvalues(Eigen::MatrixXcd& H) {
  const auto n = static_cast<lapack_int>(H.rows());
  lapack_int ilo = 1, ihi = n;
  std::vector<double> scale(n);
  lapack_int info = LAPACKE_zgebal(LAPACK_COL_MAJOR, 'B', n,
                                   reinterpret_cast<lapack_complex_double*>(H.data()), n,
                                   &ilo, &ihi, scale.data());
  if (info != 0) throw std::runtime_error("zeros_of: balancing failed");
  Eigen::VectorXcd w(n);
  info = LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, ilo, ihi,
                        reinterpret_cast<lapack_complex_double*>(H.data()), n,
                        reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1);
  if (info != 0) throw std::runtime_error("zeros_of: Hessenberg QR failed");
  return w;
}

Complex horner(const Eigen::VectorXcd& a, Complex z) {
  Complex v = a(a.size() - 1);
  for (int j = static_cast<int>(a.size()) - 2; j >= 0; --j) v = v * z + a(j);
  return v;
}

Complex horner_deriv(const Eigen::VectorXcd& a, Complex z) {
  const int d = static_cast<int>(a.size()) - 1;
  Complex v = double(d) * a(d);
  for (int j = d - 1; j >= 1; --j) v = v * z + double(j) * a(j);
  return v;
}

}  // namespace

ZeroSet zeros_of(const GaussianSection& section, const SectionBasis& basis) {
  if (section.k != basis.k) throw std::invalid_argument("zeros_of: k mismatch");
  const int k = basis.k;
  Eigen::VectorXcd a = basis.coeffs.transpose() * section.c;
  double amax = a.cwiseAbs().maxCoeff();
  if (amax <= 0.0) throw std::invalid_argument("zeros_of: section identically zero");
  a /= amax;

  int deg = k;
  while (deg > 0 && std::abs(a(deg)) < 1e-250) --deg;

  ZeroSet zs;
  for (int i = deg; i < k; ++i) zs.roots.push_back(Point::infinity());
  if (deg == 0) return zs;

  Eigen::VectorXcd rev(deg + 1);  // reversed: roots at 1/w
  for (int j = 0; j <= deg; ++j) rev(j) = a(deg - j);
  Eigen::VectorXcd head = a.head(deg + 1);

  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -a(i) / a(deg);
  Eigen::VectorXcd eigs = companion_eigenvalues(C);

  double log_scale = std::log(head.norm());
  for (int i = 0; i < deg; ++i) {
    Complex w = eigs(i);
    double res_log;
    if (std::abs(w) <= 1.0) {
      Complex p = horner(head, w), dp = horner_deriv(head, w);
      if (dp != Complex(0)) w -= p / dp;
      res_log = std::log(std::abs(horner(head, w)));
    } else {
      Complex v = 1.0 / w;
      Complex p = horner(rev, v), dp = horner_deriv(rev, v);
      if (dp != Complex(0)) v -= p / dp;
      w = 1.0 / v;
      res_log = deg * std::log(std::abs(w)) + std::log(std::abs(horner(rev, v)));
    }
    double rel = res_log - (log_scale + 0.5 * deg * std::log1p(std::norm(w)));
    if (rel > std::log(1e-8)) {
      throw std::runtime_error("zeros_of: residual check failed at root (" +
                               std::to_string(w.real()) + ", " + std::to_string(w.imag()) +
                               ")");
    }
    zs.roots.push_back(Point{w, false});
  }
  return zs;
}

double nu1_constant() {
  return oracle::riemann_zeta(1.5) / (8.0 * std::pow(M_PI, 1.5));
}

NumberVarianceResult number_variance(int k, const SetRegion& region, long n, uint64_t seed) {
  SectionBasis basis = build_basis(k);
  std::vector<double> counts(n);
  parallel_for(n, [&](long i) {
    auto rng = make_engine(seed, 0x6e766172ULL, static_cast<uint64_t>(i));
    GaussianSection s = sample_section(k, rng);
    counts[i] = static_cast<double>(zeros_of(s, basis).count_in(region));
  });
  NumberVarianceResult out;
  double v = sample_variance(counts);
  double m = mean(counts);
  double m4 = 0.0;
  for (double x : counts) m4 += std::pow(x - m, 4);
  m4 /= n;
  out.variance.estimate = v;
  out.variance.std_error = std::sqrt(std::max(m4 - v * v, 0.0) / n);
  out.variance.n = n;
  out.variance.manifest = {{"k", k}, {"u_lo", region.u_lo}, {"u_hi", region.u_hi},
                           {"seed", seed}, {"n", n}};
  out.predicted = std::sqrt(double(k)) * nu1_constant() * region.boundary_length();
  out.mean_count = m;
  return out;
}

std::vector<DensityBin> zero_density_bins(int k, long n, uint64_t seed) {
  SectionBasis basis = build_basis(k);
  std::vector<std::array<double, 8>> counts(n);
  parallel_for(n, [&](long i) {
    auto rng = make_engine(seed, 0x62696e73ULL, static_cast<uint64_t>(i));
    GaussianSection s = sample_section(k, rng);
    ZeroSet zs = zeros_of(s, basis);
    counts[i].fill(0.0);
    for (const auto& root : zs.roots) {
      double u = area_coord(root);
      double th = root.at_infinity ? 0.0 : std::arg(root.z);
      if (th < 0) th += 2.0 * M_PI;
      int cell = (u < 0.5 ? 0 : 4) + std::min(3, static_cast<int>(th / (M_PI / 2.0)));
      counts[i][cell] += 1.0;
    }
  });
  std::vector<DensityBin> bins(8);
  std::vector<double> series(n);
  for (int c = 0; c < 8; ++c) {
    for (long i = 0; i < n; ++i) series[i] = counts[i][c];
    bins[c].expected = k / 8.0;
    bins[c].mean = mean(series);
    bins[c].std_error = std::sqrt(sample_variance(series) / n);
  }
  return bins;
}

}  // namespace bergman
