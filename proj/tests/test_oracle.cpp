#include "bergman/oracle.hpp"

#include "bergman/heat_sampler.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace bergman;
using oracle::BiPotentialQuery;

TEST_CASE("small_rho_integral equals 2t") {
  for (double t : {0.1, 1.0, 5.0, 20.0}) {
    auto rep = oracle::small_rho_integral(t);
    CHECK(std::abs(rep.value - 2.0 * t) / (2.0 * t) < 1e-6);
    CHECK(rep.abs_error_estimate < 1e-8 * (1.0 + 2.0 * t));
  }
}

TEST_CASE("amplitude values (independent quadrature oracle, frozen)") {
  CHECK(oracle::bipotential_amplitude(0.5, 0.3) ==
        doctest::Approx(0.40433066306033294).epsilon(1e-12));
  CHECK(oracle::bipotential_amplitude(2.0, 0.9) ==
        doctest::Approx(4.679016345302652).epsilon(1e-12));
  CHECK(oracle::bipotential_amplitude(5.0, 0.1) ==
        doctest::Approx(10.42882423963688).epsilon(1e-12));
  CHECK(oracle::bipotential_amplitude(0.0, 0.5) == 0.0);
  // A(lam, 0) = 2 lam tanh lam
  for (double l : {0.2, 1.0, 4.0})
    CHECK(oracle::bipotential_amplitude(l, 0.0) ==
          doctest::Approx(2.0 * l * std::tanh(l)).epsilon(1e-12));
}

TEST_CASE("d_rho_bipotential frozen values") {
  auto val = [](double t, double rho) {
    return oracle::d_rho_bipotential({t, rho, 1e-11}).value;
  };
  CHECK(val(0.5, 0.3) == doctest::Approx(0.5942140142971586).epsilon(1e-8));
  CHECK(val(1.0, 0.3) == doctest::Approx(0.8446670876604108).epsilon(1e-8));
  CHECK(val(1.0, 0.6) == doctest::Approx(1.0248252139967349).epsilon(1e-8));
  CHECK(val(10.0, 0.9) == doctest::Approx(2.5559420581893306).epsilon(1e-8));
}

TEST_CASE("direct and expanded evaluation paths agree") {
  for (double t : {0.5, 1.0, 10.0})
    for (double rho : {0.05, 0.3, 0.6, 0.9}) {
      BiPotentialQuery direct{t, rho, 1e-11};
      BiPotentialQuery expanded{t, rho, 1e-11};
      expanded.rho_switch = 1.0;  // force the expanded path
      double a = oracle::d_rho_bipotential(direct).value;
      double b = oracle::d_rho_bipotential(expanded).value;
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("t -> infinity limit of d_rho") {
  for (double rho : {0.1, 0.5, 0.9}) {
    double lim = -std::log1p(-rho) / rho;
    double v = oracle::d_rho_bipotential({200.0, rho, 1e-11}).value;
    CHECK(std::abs(v - lim) / std::abs(lim) < 2e-2);
  }
  CHECK(oracle::d_rho_bipotential({100.0, 0.5, 1e-11}).value ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(2e-2));
}

TEST_CASE("small-rho cancellation") {
  double v = oracle::d_rho_bipotential({1.0, 1e-6, 1e-9}).value;
  CHECK(std::abs(v) < 10.0);
  // rho * d_rho I -> 0
  CHECK(std::abs(1e-6 * v) < 1e-4);
}

TEST_CASE("d_rho is finite, positive, increasing in rho") {
  // the spec sheet says decreasing; the t = infinity limit -log(1-rho)/rho is
  // increasing, and so is the finite-t curve
  for (double t : {0.5, 1.0, 10.0}) {
    double prev = 0.0;
    for (int i = 1; i <= 24; ++i) {
      double rho = i / 25.0;
      double v = oracle::d_rho_bipotential({t, rho, 1e-10}).value;
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("integral of d_rho at large t matches Li2 differences") {
  auto rep = oracle::bipotential_integral(200.0, 0.3, 0.6, 1e-8);
  double li = oracle::dilog(0.6) - oracle::dilog(0.3);
  CHECK(li == doctest::Approx(0.40145679764085673).epsilon(1e-12));
  CHECK(std::abs(rep.value - li) / li < 2e-2);
}

TEST_CASE("dilog values and reflection") {
  CHECK(oracle::dilog(0.0) == 0.0);
  CHECK(oracle::dilog(1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-15));
  double li_half = M_PI * M_PI / 12.0 - 0.5 * std::log(2.0) * std::log(2.0);
  CHECK(oracle::dilog(0.5) == doctest::Approx(li_half).epsilon(1e-13));
  for (int i = 1; i < 100; ++i) {
    double rho = i / 100.0;
    double res = oracle::dilog(rho) + oracle::dilog(1.0 - rho) -
                 (M_PI * M_PI / 6.0 - std::log(rho) * std::log1p(-rho));
    CHECK(std::abs(res) < 1e-12);
  }
}

TEST_CASE("hciz: closed cases, symmetry, confluent limits") {
  Eigen::VectorXd a1(1), b1(1);
  a1 << 0.7;
  b1 << -1.3;
  CHECK(oracle::hciz(a1, b1, 2.0) == doctest::Approx(std::exp(2.0 * 0.7 * -1.3)));

  Eigen::VectorXd a(2), b(2);
  a << 1.0, 0.0;
  b << 1.0, 0.0;
  CHECK(oracle::hciz(a, b, 1.0) == doctest::Approx(M_E - 1.0).epsilon(1e-12));

  Eigen::VectorXd a2(3), b2(3);
  a2 << 1.1, 0.3, -0.5;
  b2 << 0.9, 0.2, -0.7;
  double v = oracle::hciz(a2, b2, 1.0);
  CHECK(oracle::hciz(b2, a2, 1.0) == doctest::Approx(v).epsilon(1e-12));
  Eigen::VectorXd a2p(3);
  a2p << -0.5, 1.1, 0.3;  // permuted
  CHECK(oracle::hciz(a2p, b2, 1.0) == doctest::Approx(v).epsilon(1e-12));

  // confluent: a = (x,x) has limit e^{mu x (b1+b2)}
  Eigen::VectorXd ac(2), bc(2);
  ac << 0.4, 0.4;
  bc << 0.9, -0.2;
  CHECK(oracle::hciz(ac, bc, 1.3) ==
        doctest::Approx(std::exp(1.3 * 0.4 * 0.7)).epsilon(1e-12));
  // continuity against a slightly split spectrum
  Eigen::VectorXd as(2);
  as << 0.4, 0.4 + 1e-5;
  CHECK(oracle::hciz(as, bc, 1.3) == doctest::Approx(oracle::hciz(ac, bc, 1.3)).epsilon(1e-4));
  // degenerate side may be b (swapped internally)
  CHECK(oracle::hciz(bc, ac, 1.3) == doctest::Approx(oracle::hciz(ac, bc, 1.3)).epsilon(1e-12));
  Eigen::VectorXd both(2);
  both << 0.5, 0.5;
  CHECK_THROWS(oracle::hciz(both, both, 1.0));
}

TEST_CASE("hciz against a Haar Monte Carlo oracle (quick)") {
  Eigen::VectorXd a(2), b(2);
  a << 0.7, -0.4;
  b << 1.2, 0.1;
  const double mu = 0.8;
  double det = oracle::hciz(a, b, mu);
  auto rng = make_engine(99);
  const long n = 200000;
  double s = 0.0, s2 = 0.0;
  for (long i = 0; i < n; ++i) {
    Eigen::MatrixXcd U = haar_unitary(2, rng);
    double tr = 0.0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) tr += a(p) * b(q) * std::norm(U(p, q));
    double v = std::exp(mu * tr);
    s += v;
    s2 += v * v;
  }
  double mean = s / n;
  double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
  CHECK(std::abs(det - mean) < 3.0 * se);
}

TEST_CASE("gaussian-vandermonde identity") {
  {
    Eigen::VectorXd mu(2);
    mu << 1.0, -1.0;
    auto [lhs, rhs] = oracle::gaussian_vandermonde_identity(mu, 1.0);
    CHECK(std::abs(lhs / rhs - 1.0) < 1e-6);
  }
  {
    Eigen::VectorXd mu(3);
    mu << 1.0, 0.0, -1.0;
    auto [lhs, rhs] = oracle::gaussian_vandermonde_identity(mu, 0.5);
    CHECK(std::abs(lhs / rhs - 1.0) < 1e-6);
  }
  {
    Eigen::VectorXd mu(2);
    mu << 0.7, 0.7;  // coincident: both sides vanish
    auto [lhs, rhs] = oracle::gaussian_vandermonde_identity(mu, 1.0);
    CHECK(rhs == 0.0);
    CHECK(std::abs(lhs) < 1e-8 * std::exp(1.0 * mu.squaredNorm()) * 4.0);
  }
}

TEST_CASE("energy-entropy exponent equals the density at rescaled time") {
  auto rng = make_engine(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int n : {2, 4}) {
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam(i) = n01(rng);
    lam.array() -= lam.mean();
    for (double t : {0.5, 2.0}) {
      HeatParams params{n, t / n, TimeScaling::raw, n - 1};
      CHECK(oracle::energy_entropy_exponent(lam, t, n - 1) ==
            doctest::Approx(eigen_log_density(lam, params)).epsilon(1e-12));
    }
  }
  Eigen::VectorXd lam2(2);
  lam2 << 1.0, -1.0;
  double expect = std::log(2.0) + std::log(M_E - 1.0 / M_E) - 1.0;
  CHECK(oracle::energy_entropy_exponent(lam2, 1.0, 1) == doctest::Approx(expect).epsilon(1e-12));
  Eigen::VectorXd same(2);
  same << 0.0, 0.0;
  CHECK(oracle::energy_entropy_exponent(same, 1.0, 1) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("riemann zeta") {
  CHECK(oracle::riemann_zeta(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  CHECK(oracle::riemann_zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-12));
  CHECK(oracle::riemann_zeta(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-11));
}
