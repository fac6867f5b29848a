#include "bergman/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>

namespace bergman::quad {

namespace detail {
// QUADPACK (G7,K15) constants, positive half.
const double kKronrodNodes[8] = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
const double kKronrodWeights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
const double kGaussWeights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};
}  // namespace detail

namespace {

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

void gk15_scalar(const std::function<double(double)>& f, double a, double b,
                 double& value, double& err, long& evals) {
  using namespace detail;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kKronrodWeights[0] * fc;
  double gauss = kGaussWeights[0] * fc;
  for (int i = 1; i < 8; ++i) {
    double s = f(c - h * kKronrodNodes[i]) + f(c + h * kKronrodNodes[i]);
    kron += kKronrodWeights[i] * s;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * s;
  }
  value = h * kron;
  err = std::abs(h * (kron - gauss));
  evals += 15;
}

}  // namespace

QuadResult adaptive_gk(const std::function<double(double)>& f, double a, double b,
                       double abs_tol, double rel_tol, int max_panels) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Panel> heap;
  Panel p{a, b, 0, 0};
  gk15_scalar(f, a, b, p.value, p.err, res.evals);
  heap.push(p);
  double total = p.value, toterr = p.err;
  int panels = 1;
  while (panels < max_panels) {
    double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (toterr <= tol) break;
    Panel top = heap.top();
    heap.pop();
    double mid = 0.5 * (top.a + top.b);
    Panel l{top.a, mid, 0, 0}, r{mid, top.b, 0, 0};
    gk15_scalar(f, l.a, l.b, l.value, l.err, res.evals);
    gk15_scalar(f, r.a, r.b, r.value, r.err, res.evals);
    total += l.value + r.value - top.value;
    toterr += l.err + r.err - top.err;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  res.value = total;
  res.abs_err = std::max(toterr, 0.0);
  res.converged = toterr <= std::max(abs_tol, rel_tol * std::abs(total));
  return res;
}

namespace {

// symmetric tridiagonal Jacobi matrix -> nodes/weights
void golub_welsch(const Eigen::VectorXd& offdiag, double mu0,
                  std::vector<double>& x, std::vector<double>& w) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag(i);
    J(i + 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::VectorXd off(n - 1);
  for (int i = 1; i < n; ++i) off(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  golub_welsch(off, 2.0, x, w);
}

void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::VectorXd off(n - 1);
  for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(0.5 * i);
  golub_welsch(off, std::sqrt(M_PI), x, w);
}

QuadResult integrate_rect(const std::function<double(double, double)>& F,
                          double abs_tol, int max_panels) {
  QuadResult res;
  const double tau = 2.0 * M_PI;
  long inner_evals = 0;
  auto outer = [&](double th) {
    auto r = adaptive_gk([&](double u) { return F(u, th); }, 0.0, 1.0,
                         abs_tol / (tau * 4.0), 1e-12, max_panels);
    inner_evals += r.evals;
    return r.value;
  };
  auto out = adaptive_gk(outer, 0.0, tau, abs_tol, 1e-12, max_panels);
  out.evals += inner_evals;
  return out;
}

}  // namespace bergman::quad
