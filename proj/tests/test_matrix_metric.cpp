#include "bergman/matrix_metric.hpp"

#include "bergman/heat_sampler.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace bergman;

namespace {

PositiveMatrix random_positive(int n, uint64_t seed, double spread = 1.0) {
  auto rng = make_engine(seed);
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = complex_gaussian(rng);
  Eigen::MatrixXcd H = G * G.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
  return PositiveMatrix::normalized(spread * H);
}

}  // namespace

TEST_CASE("PositiveMatrix validation") {
  Eigen::MatrixXcd m = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS(PositiveMatrix::from_entries(m));  // det != 1 rejected
  PositiveMatrix p = PositiveMatrix::normalized(m);
  CHECK(p.entries()(0, 0).real() == doctest::Approx(1.0));

  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, Complex(0, 1), Complex(0, 1), 1.0;  // not Hermitian
  CHECK_THROWS(PositiveMatrix::from_entries(bad));

  Eigen::MatrixXcd indef(2, 2);
  indef << 2.0, 0.0, 0.0, -0.5;
  CHECK_THROWS(PositiveMatrix::from_entries(indef));
}

TEST_CASE("polar_decompose identity and round trips") {
  PositiveMatrix id = PositiveMatrix::identity(3);
  PolarCoords pc = polar_decompose(id);
  CHECK(pc.lambda.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK((pc.U - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);

  for (int n : {2, 8, 64}) {
    PositiveMatrix p = random_positive(n, 100 + n);
    PolarCoords q = polar_decompose(p);
    CHECK(std::abs(q.lambda.sum()) < 1e-10);
    CHECK((q.U * q.U.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12);
    CHECK((q.reconstruct() - p.entries()).norm() < 1e-10 * p.entries().norm());
    for (int i = 0; i + 1 < n; ++i) CHECK(q.lambda(i) >= q.lambda(i + 1));
  }
}

TEST_CASE("polar_decompose survives a tiny eigenvalue gap") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
  m(0, 0) = 1.0 + 1e-14;
  m(1, 1) = 1.0;
  PositiveMatrix p = PositiveMatrix::normalized(m);
  PolarCoords pc = polar_decompose(p);
  CHECK((pc.U * pc.U.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  CHECK((pc.reconstruct() - p.entries()).norm() < 1e-10);
}

TEST_CASE("haar volume density") {
  Eigen::VectorXd lam(2);
  lam << 0.7, -0.7;
  double expect = std::pow(std::exp(-0.7) - std::exp(0.7), 2);
  CHECK(haar_volume_density(lam) == doctest::Approx(expect).epsilon(1e-12));

  Eigen::VectorXd lam3(3);
  lam3 << 1.0, 0.0, -1.0;
  double d = (std::exp(0.0) - std::exp(1.0)) * (std::exp(-1.0) - std::exp(1.0)) *
             (std::exp(-1.0) - std::exp(0.0));
  CHECK(haar_volume_density(lam3) == doctest::Approx(d * d).epsilon(1e-12));

  Eigen::VectorXd same(2);
  same << 0.3, 0.3;
  CHECK(haar_volume_density(same) == 0.0);
}

TEST_CASE("kahler potential examples") {
  SectionBasis b = build_basis(1);
  Eigen::MatrixXcd m(2, 2);
  m << 2.0, 0.0, 0.0, 0.5;
  KahlerPotentialSample s(PositiveMatrix::from_entries(m), 1);
  CHECK(kahler_potential(s, b, Point{{0, 0}, false}) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // P = I: phi_I(z) = (1/k) log B(z,z)
  KahlerPotentialSample id(PositiveMatrix::identity(2), 1);
  Point p{{0.5, -0.3}, false};
  double expect = std::log(2.0 * (1.0 + std::norm(p.z)));
  CHECK(kahler_potential(id, b, p) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(relative_potential(id, b, p) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS(PositiveMatrix::from_entries(2.0 * Eigen::MatrixXcd::Identity(2, 2)));
}

TEST_CASE("gauge invariance: rotating P and the basis together") {
  // with sections s' = U s the matrix transforms as P' = U P U^dag
  const int k = 3, n = 4;
  SectionBasis b = build_basis(k);
  auto rng = make_engine(5);
  Eigen::MatrixXcd U = haar_unitary(n, rng);
  PositiveMatrix P = random_positive(n, 17);
  PositiveMatrix Pc = PositiveMatrix::normalized(U * P.entries() * U.adjoint());
  KahlerPotentialSample s1(P, k), s2(Pc, k);
  SectionBasis rotated{k, U * b.coeffs};
  for (double r : {0.0, 0.7, 2.5}) {
    Point p{{r, 0.3 * r}, false};
    CHECK(kahler_potential(s2, rotated, p) ==
          doctest::Approx(kahler_potential(s1, b, p)).epsilon(1e-10));
  }
}

TEST_CASE("metric density: FS invariance, exact rational example, positivity") {
  SectionBasis b1 = build_basis(1);
  KahlerPotentialSample id(PositiveMatrix::identity(2), 1);
  for (double r : {0.0, 0.5, 3.0}) {
    Point p{{r, 0.1}, false};
    CHECK(metric_density_invariant(id, b1, p) == doctest::Approx(1.0).epsilon(1e-11));
  }

  Eigen::MatrixXcd m(2, 2);
  m << 4.0, 0.0, 0.0, 0.25;
  KahlerPotentialSample s(PositiveMatrix::from_entries(m), 1);
  CHECK(metric_density(s, b1, Point{{0, 0}, false}) ==
        doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(metric_density_invariant(s, b1, Point::infinity()) ==
        doctest::Approx(16.0).epsilon(1e-12));

  // positivity on a grid for random P
  const int k = 4;
  SectionBasis b4 = build_basis(k);
  KahlerPotentialSample rs(random_positive(5, 23), k);
  for (double u : {0.05, 0.35, 0.65, 0.95})
    for (double th : {0.1, 1.3, 2.9, 4.4})
      CHECK(metric_density_invariant(rs, b4, point_from_area_coord(u, th)) > 0.0);
}

TEST_CASE("metric density agrees with finite differences of the potential") {
  const int k = 3;
  SectionBasis b = build_basis(k);
  KahlerPotentialSample s(random_positive(4, 31), k);
  Point p{{0.35, -0.2}, false};
  double h = 1e-4;
  auto phi = [&](double dx, double dy) {
    return kahler_potential(s, b, Point{{p.z.real() + dx, p.z.imag() + dy}, false});
  };
  double lap = (phi(h, 0) + phi(-h, 0) + phi(0, h) + phi(0, -h) - 4.0 * phi(0, 0)) / (h * h);
  double density = lap / 4.0;  // d/dz d/dzbar = Laplacian/4
  CHECK(metric_density(s, b, p) == doctest::Approx(density).epsilon(1e-5));
}

TEST_CASE("cohomology: total integral of the metric is 2 pi for random P") {
  const int k = 3;
  SectionBasis b = build_basis(k);
  for (uint64_t seed : {81, 82, 83}) {
    KahlerPotentialSample s(random_positive(4, seed, 2.0), k);
    auto r = quad::integrate_rect(
        [&](double u, double th) {
          return metric_density_invariant(s, b, point_from_area_coord(u, th));
        },
        1e-8);
    CHECK(r.value == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
  }
}

TEST_CASE("matrix JSON round trip") {
  PositiveMatrix p = random_positive(3, 7);
  PositiveMatrix q = matrix_from_json(matrix_to_json(p));
  CHECK((p.entries() - q.entries()).norm() < 1e-12);
}
