#include "bergman/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace bergman;

TEST_CASE("adaptive GK integrates a Gaussian") {
  auto r = quad::adaptive_gk([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("adaptive GK handles an integrable log singularity") {
  auto r = quad::adaptive_gk([](double x) { return std::log(x); }, 0.0, 1.0, 1e-10, 1e-12,
                             20000);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("Gauss-Hermite nodes integrate moments of e^{-x^2}") {
  std::vector<double> x, w;
  quad::gauss_hermite(16, x, w);
  double m0 = 0, m2 = 0, m4 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    m0 += w[i];
    m2 += w[i] * x[i] * x[i];
    m4 += w[i] * std::pow(x[i], 4);
  }
  CHECK(m0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre exactness") {
  std::vector<double> x, w;
  quad::gauss_legendre(12, x, w);
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("rectangle integrator") {
  auto r = quad::integrate_rect([](double u, double th) { return u * std::sin(th) + 1.0; },
                                1e-10);
  CHECK(r.value == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
}
