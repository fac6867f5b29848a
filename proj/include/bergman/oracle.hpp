#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>

namespace bergman::oracle {

struct QuadratureReport {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

struct ToleranceError : std::runtime_error {
  ToleranceError(const std::string& what, QuadratureReport achieved_)
      : std::runtime_error(what), achieved(achieved_) {}
  QuadratureReport achieved;
};

struct BiPotentialQuery {
  double t = 1.0;
  double rho = 0.5;        // strictly inside (0,1)
  double tolerance = 1e-9;
  double rho_switch = 1e-3;  // below: analytically expanded small-rho form
};

// dI_2/drho(t, rho) = 2t/rho - (sqrt(1-rho)/rho) * E_{lam~N(t,t)}[A(|lam|, rho)]
// with the amplitude A = (2/sqrt(q)) log[(sqrt(q)+sqrt(1-rho)) sinh lam],
// q = 1 - rho + 1/sinh^2(lam). For rho < rho_switch (and for t > 20, where
// the direct subtraction loses digits) the 2t/rho term is cancelled
// analytically before quadrature. Tolerances below the double-precision
// floor of the expression, ~1e-13 (1 + 2t/rho), are clamped to that floor;
// beyond it a ToleranceError carries the achieved estimate.
QuadratureReport d_rho_bipotential(const BiPotentialQuery& q);

// definite integral of d_rho_bipotential over [rho_lo, rho_hi]
QuadratureReport bipotential_integral(double t, double rho_lo, double rho_hi,
                                      double tolerance = 1e-8);

// the amplitude and its exact rho-difference from A(.,0) = 2 lam tanh lam
double bipotential_amplitude(double lam, double rho);
double bipotential_amplitude_delta(double lam, double rho);

// E_{lam~N(t,t)}[2 lam tanh lam]; equals 2t identically
QuadratureReport small_rho_integral(double t, double tolerance = 1e-10);

// Li2 on [0,1]: series below 1/2, reflection identity above; abs err <= 1e-12
double dilog(double rho);

// HCIZ: (prod_{p<N} p!) mu^{-N(N-1)/2} det(e^{mu a_j b_l}) / (Delta(a) Delta(b));
// coincident eigenvalues handled by confluent divided differences (on one
// side; degeneracy on both sides is unsupported).
double hciz(Eigen::VectorXd a, Eigen::VectorXd b, double mu,
            double confluence_tol = 1e-6);

// lhs: N-fold Gauss-Hermite quadrature of Delta(lam) e^{sum(-lam^2/4t + mu lam)};
// rhs: (2pi)^{N/2} (2t)^{N^2/2} Delta(mu) e^{t sum mu^2}
std::pair<double, double> gaussian_vandermonde_identity(const Eigen::VectorXd& mu, double t);

// (N^2/2) [ II' log|x-y| dmu dmu + II' log|e^x-e^y| dmu dmu - (1/2t) I x^2 dmu ]
// over the empirical eigenvalue measure (diagonal excluded); equals
// eigen_log_density(lambda, t/N).
double energy_entropy_exponent(const Eigen::VectorXd& lambda, double t, int k);

// zeta(s) for s > 1 by Euler-Maclaurin (used for the variance-law constants)
double riemann_zeta(double s);

}  // namespace bergman::oracle
