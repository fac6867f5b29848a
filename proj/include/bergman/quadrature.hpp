#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace bergman::quad {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  long evals = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (G7,K15), worst-panel-first refinement.
QuadResult adaptive_gk(const std::function<double(double)>& f, double a, double b,
                       double abs_tol, double rel_tol = 1e-12, int max_panels = 4000);

// Golub-Welsch nodes/weights. Legendre: weight 1 on [-1,1].
// Hermite: weight e^{-x^2} on R.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w);

// Integrate F(u,theta) over [0,1] x [0,2pi): adaptive in both directions.
QuadResult integrate_rect(const std::function<double(double, double)>& F,
                          double abs_tol, int max_panels = 4000);

namespace detail {
extern const double kKronrodNodes[8];
extern const double kKronrodWeights[8];
extern const double kGaussWeights[4];
}  // namespace detail

// Generic GK15 panel for vector-like values (Eigen matrices, etc.).
// V must support v1 + v2, v1 - v2, scalar * v; norm(v) supplied by caller.
template <class V, class F, class NormFn>
void gk15_panel(const F& f, double a, double b, V& result, double& err, const NormFn& nrm) {
  using namespace detail;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  V fc = f(c);
  V kron = kKronrodWeights[0] * fc;
  V gauss = kGaussWeights[0] * fc;
  for (int i = 1; i < 8; ++i) {
    V lo = f(c - h * kKronrodNodes[i]);
    V hi = f(c + h * kKronrodNodes[i]);
    V s = lo + hi;
    kron = kron + kKronrodWeights[i] * s;
    if (i % 2 == 0) gauss = gauss + kGaussWeights[i / 2] * s;
  }
  result = h * kron;
  err = nrm(h * (kron - gauss));
}

template <class V, class F, class NormFn>
V adaptive_generic(const F& f, double a, double b, double abs_tol, const NormFn& nrm,
                   int max_depth = 40) {
  V whole;
  double err;
  gk15_panel<V>(f, a, b, whole, err, nrm);
  std::function<V(double, double, V, double, double, int)> rec =
      [&](double lo, double hi, V est, double e, double tol, int depth) -> V {
    if (e <= tol || depth >= max_depth) return est;
    double mid = 0.5 * (lo + hi);
    V l, r;
    double el, er;
    gk15_panel<V>(f, lo, mid, l, el, nrm);
    gk15_panel<V>(f, mid, hi, r, er, nrm);
    return rec(lo, mid, l, el, 0.5 * tol, depth + 1) +
           rec(mid, hi, r, er, 0.5 * tol, depth + 1);
  };
  return rec(a, b, whole, err, abs_tol, 0);
}

}  // namespace bergman::quad
