#include "bergman/heat_sampler.hpp"

#include "bergman/quadrature.hpp"
#include "bergman/statistics.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bergman;

namespace {

// radial density on the N=2 hyperplane lambda = (a, -a):
// 4 |a| sinh|a| e^{-a^2/2t}
double n2_density(double a, double t) {
  return 4.0 * std::abs(a) * std::sinh(std::abs(a)) * std::exp(-a * a / (2.0 * t));
}

double n2_moment(double t, int pow_abs) {
  auto num = quad::adaptive_gk(
      [&](double a) { return std::pow(a, pow_abs) * n2_density(a, t); }, 0.0,
      30.0 * std::sqrt(t) + 30.0, 1e-12);
  auto den = quad::adaptive_gk([&](double a) { return n2_density(a, t); }, 0.0,
                               30.0 * std::sqrt(t) + 30.0, 1e-12);
  return num.value / den.value;
}

}  // namespace

TEST_CASE("heat normalization closed form at N=2 and the spectral gap factor") {
  for (double t : {0.5, 1.0, 3.0}) {
    HeatParams p{2, t, TimeScaling::raw, 1};
    double expect = 0.5 * std::log(2.0) - std::log(2.0 * M_PI) -
                    1.5 * std::log(4.0 * M_PI * t) - t / 2.0;
    CHECK(heat_normalization(p).log_value == doctest::Approx(expect).epsilon(1e-13));
  }
  for (int N : {2, 3, 5})
    CHECK(delta_vector(N).squaredNorm() ==
          doctest::Approx(N * (double(N) * N - 1.0) / 12.0).epsilon(1e-13));
}

TEST_CASE("mabuchi scaling rescales the time by eps_k^{-2}") {
  HeatParams p{9, 2.0, TimeScaling::mabuchi, 8};
  CHECK(p.effective_t() == doctest::Approx(2.0 * 64.0 * 9.0).epsilon(1e-13));
  HeatParams raw{9, 2.0, TimeScaling::raw, 8};
  CHECK(raw.effective_t() == 2.0);
}

TEST_CASE("eigen_log_density closed form at N=2") {
  for (double a : {0.3, 1.7})
    for (double t : {0.5, 3.0}) {
      Eigen::VectorXd lam(2);
      lam << a, -a;
      HeatParams p{2, t, TimeScaling::raw, 1};
      double expect = std::log(2.0 * a * (std::exp(a) - std::exp(-a))) - a * a / (2.0 * t);
      CHECK(eigen_log_density(lam, p) == doctest::Approx(expect).epsilon(1e-12));
    }
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  HeatParams p{2, 1.0, TimeScaling::raw, 1};
  CHECK(eigen_log_density(zero, p) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("density maximum sits near 2 t delta_N at large t") {
  const int N = 3;
  HeatParams p{N, 10.0, TimeScaling::raw, 2};
  Eigen::VectorXd peak = 2.0 * 10.0 * delta_vector(N);
  double at_peak = eigen_log_density(peak, p);
  CHECK(at_peak > eigen_log_density((0.8 * peak).eval(), p));
  CHECK(at_peak > eigen_log_density((1.2 * peak).eval(), p));
}

TEST_CASE("radial partition closed form matches quadrature (N=2) and the group factor") {
  for (double t : {0.5, 1.0, 2.0}) {
    // Z_delta = int 4|a| sinh|a| e^{-a^2/2t} da = 4 t sqrt(2 pi t) e^{t/2}
    double expect = std::log(4.0 * t * std::sqrt(2.0 * M_PI * t)) + 0.5 * t;
    CHECK(log_radial_partition(2, t) == doctest::Approx(expect).epsilon(1e-12));
    auto half = quad::adaptive_gk([&](double a) { return n2_density(a, t); }, 0.0,
                                  40.0 * std::sqrt(t) + 40.0, 1e-12);
    CHECK(std::log(2.0 * half.value) == doctest::Approx(expect).epsilon(1e-10));
    // probability normalization: C * V_N * Z_delta = 1
    HeatParams p{2, t, TimeScaling::raw, 1};
    double total = heat_normalization(p).log_value + log_group_volume_factor(2) +
                   log_radial_partition(2, t);
    CHECK(total == doctest::Approx(0.0).epsilon(1e-11));
  }
}

TEST_CASE("N=3 normalization: 2-D quadrature of the log density over the hyperplane") {
  const int N = 3;
  const double t = 1.0;
  HeatParams p{N, t, TimeScaling::raw, 2};
  Eigen::MatrixXd F = hyperplane_frame(N);
  const double L = 26.0;
  auto inner = [&](double x) {
    return quad::adaptive_gk(
               [&](double y) {
                 Eigen::VectorXd xi(2);
                 xi << x, y;
                 return std::exp(eigen_log_density(F * xi, p));
               },
               -L, L, 1e-9, 1e-10)
        .value;
  };
  double z_frame = quad::adaptive_gk(inner, -L, L, 1e-6, 1e-9).value;
  double z_delta = z_frame / std::sqrt(double(N));
  CHECK(std::log(z_delta) == doctest::Approx(log_radial_partition(N, t)).epsilon(1e-7));
  double total = heat_normalization(p).log_value + log_group_volume_factor(N) +
                 std::log(z_delta);
  CHECK(total == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("haar unitary: unitarity and first moments") {
  auto rng = make_engine(12);
  const int N = 3;
  const long n = 20000;
  double m11 = 0.0, tr_re = 0.0, tr_im = 0.0, m11_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    Eigen::MatrixXcd U = haar_unitary(N, rng);
    if (i < 50)
      CHECK((U * U.adjoint() - Eigen::MatrixXcd::Identity(N, N)).norm() < 1e-12);
    double v = std::norm(U(0, 0));
    m11 += v;
    m11_sq += v * v;
    tr_re += U.trace().real();
    tr_im += U.trace().imag();
  }
  m11 /= n;
  m11_sq /= n;
  double se = std::sqrt((m11_sq - m11 * m11) / n);
  CHECK(std::abs(m11 - 1.0 / N) < 3.0 * se);
  CHECK(std::abs(tr_re / n) < 3.0 / std::sqrt(double(n)));  // Var(tr) = 1
  CHECK(std::abs(tr_im / n) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("haar invariance: U and VU have the same |trace| distribution") {
  auto rng = make_engine(13);
  const int N = 3;
  const long n = 20000;
  Eigen::MatrixXcd V = haar_unitary(N, rng);
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
  for (long i = 0; i < n; ++i) {
    Eigen::MatrixXcd U = haar_unitary(N, rng);
    double a = std::abs(U.trace());
    double b = std::abs((V * U).trace());
    s1 += a;
    q1 += a * a;
    s2 += b;
    q2 += b * b;
  }
  double m1 = s1 / n, m2 = s2 / n;
  double se = std::sqrt((q1 / n - m1 * m1) / n + (q2 / n - m2 * m2) / n);
  CHECK(std::abs(m1 - m2) < 3.0 * se);
}

TEST_CASE("mcmc matches the 1-D quadrature oracle at N=2") {
  HeatParams params{2, 1.0, TimeScaling::raw, 1};
  McmcOptions opts;
  opts.seed = 2024;
  McmcChain chain(params, opts);
  const long n = 20000;
  std::vector<double> lam_max(n);
  for (long i = 0; i < n; ++i) lam_max[i] = chain.next().maxCoeff();
  double rate = chain.state().acceptance_rate();
  CHECK(rate > 0.05);
  CHECK(rate < 0.95);
  double expect = n2_moment(1.0, 1);  // E[lambda_max] = E[|a|]
  double se = batch_means_se(lam_max);
  CHECK(std::abs(mean(lam_max) - expect) < 3.0 * se);
  // trace-free to 1e-8 after every step
  Eigen::VectorXd lam = chain.next();
  CHECK(std::abs(lam.sum()) < 1e-8);
}

TEST_CASE("metropolis acceptance satisfies detailed balance algebraically") {
  HeatParams params{3, 1.0, TimeScaling::raw, 2};
  auto rng = make_engine(77);
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXd F = hyperplane_frame(3);
  for (int i = 0; i < 32; ++i) {
    Eigen::VectorXd x(2), y(2);
    x << n01(rng), n01(rng);
    y = x + Eigen::VectorXd::Constant(2, 0.3 * n01(rng));
    double lx = eigen_log_density(F * x, params);
    double ly = eigen_log_density(F * y, params);
    // p(x) a(x->y) = p(y) a(y->x) for the Metropolis ratio
    double lhs = lx + std::min(0.0, ly - lx);
    double rhs = ly + std::min(0.0, lx - ly);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
}

TEST_CASE("small-t eigenvalue scale: Var(|lambda|) linear in t (quadrature)") {
  // |lambda| = sqrt(2) |a|; variance ratio between t and 2t is 2 + O(t)
  double v1 = 2.0 * (n2_moment(0.02, 2) - std::pow(n2_moment(0.02, 1), 2));
  double v2 = 2.0 * (n2_moment(0.04, 2) - std::pow(n2_moment(0.04, 1), 2));
  CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mcmc_sample streams sorted eigenvalues with Haar rotations") {
  HeatParams params{3, 1.0, TimeScaling::raw, 2};
  McmcOptions opts;
  opts.seed = 5;
  opts.burnin = 500;
  auto samples = mcmc_sample(params, 200, opts);
  REQUIRE(samples.size() == 200);
  for (const auto& s : samples) {
    CHECK(s.lambda(0) >= s.lambda(1));
    CHECK(s.lambda(1) >= s.lambda(2));
    CHECK(std::abs(s.lambda.sum()) < 1e-8);
    CHECK((s.U * s.U.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("brownian walk: t -> 0 limit is the identity") {
  HeatParams params{3, 1e-4, TimeScaling::raw, 2};
  auto rng = make_engine(8);
  PositiveMatrix X = brownian_sample(params, 100, rng);
  CHECK((X.entries() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 0.2);
  PolarCoords pc = polar_decompose(X);
  CHECK(std::abs(pc.lambda.sum()) < 1e-8);
}

TEST_CASE("brownian vs mcmc cross-check at N=2, t=1 (KS)") {
  HeatParams params{2, 1.0, TimeScaling::raw, 1};
  const long n = 4000;
  McmcOptions opts;
  opts.seed = 31;
  McmcChain chain(params, opts);
  std::vector<double> mc(n), bw(n);
  for (long i = 0; i < n; ++i) mc[i] = chain.next().squaredNorm();
  auto rng = make_engine(32);
  for (long i = 0; i < n; ++i) {
    PositiveMatrix X = brownian_sample(params, 100, rng);
    bw[i] = polar_decompose(X).lambda.squaredNorm();
  }
  CHECK(ks_two_sample(mc, bw) < 0.05);
}

TEST_CASE("brownian invariance under unitary conjugation (moment test)") {
  HeatParams params{2, 1.0, TimeScaling::raw, 1};
  auto vrng = make_engine(40);
  Eigen::MatrixXcd V = haar_unitary(2, vrng);
  const long n = 4000;
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
  auto rng = make_engine(41);
  for (long i = 0; i < n; ++i) {
    PositiveMatrix X = brownian_sample(params, 100, rng);
    double a = X.entries()(0, 0).real();
    double b = (V.adjoint() * X.entries() * V)(0, 0).real();
    s1 += a;
    q1 += a * a;
    s2 += b;
    q2 += b * b;
  }
  double m1 = s1 / n, m2 = s2 / n;
  double se = std::sqrt((q1 / n - m1 * m1) / n + (q2 / n - m2 * m2) / n);
  CHECK(std::abs(m1 - m2) < 3.0 * se);
}

TEST_CASE("concentration report") {
  HeatParams params{4, 10.0, TimeScaling::raw, 3};
  PolarSample s;
  s.lambda = (2.0 * 10.0 * delta_vector(4)).reverse();
  s.U = Eigen::MatrixXcd::Identity(4, 4);
  auto rep = concentration_report(s, params);
  CHECK(rep.angle < 1e-6);
  CHECK(rep.radius == doctest::Approx(rep.expected_radius).epsilon(1e-12));
}

TEST_CASE("polar record round trip") {
  PolarSample s;
  s.lambda = Eigen::Vector3d(0.4, 0.1, -0.5);
  auto rng = make_engine(50);
  s.U = haar_unitary(3, rng);
  std::stringstream ss;
  write_polar_record(ss, s);
  PolarSample r;
  CHECK(read_polar_record(ss, r));
  CHECK((r.lambda - s.lambda).norm() == 0.0);
  CHECK((r.U - s.U).norm() == 0.0);
}
