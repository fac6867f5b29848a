#include "bergman/heat_sampler.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace bergman {

double HeatParams::effective_t() const {
  if (scaling == TimeScaling::raw) return t;
  if (k < 1) throw std::invalid_argument("mabuchi scaling requires k");
  double Nk = k + 1.0;
  double eps2 = 1.0 / (double(k) * k * Nk);  // eps_k^2, eps_k = k^{-1} N_k^{-1/2}
  return t / eps2;
}

LogValue heat_normalization(const HeatParams& params) {
  const int N = params.N;
  const double t = params.effective_t();
  if (N < 2 || t <= 0.0) throw std::invalid_argument("heat_normalization: need N >= 2, t > 0");
  double logc = 0.5 * std::log(double(N)) - std::log(2.0 * M_PI) -
                0.5 * (N * N - 1) * std::log(4.0 * M_PI * t) -
                t * N * (double(N) * N - 1) / 12.0;
  return LogValue{logc};
}

double eigen_log_density(const Eigen::VectorXd& lambda, const HeatParams& params) {
  const int n = static_cast<int>(lambda.size());
  const double t = params.effective_t();
  double ld = -lambda.squaredNorm() / (4.0 * t);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = std::abs(lambda(i) - lambda(j));
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      ld += std::log(d) + std::max(lambda(i), lambda(j)) + std::log1p(-std::exp(-d));
    }
  return ld;
}

double log_radial_partition(int N, double t) {
  // (1/2pi) N! prod_{p<N} p! (2pi)^{N/2} (2t)^{N^2/2} sqrt(pi/(tN)) e^{t N(N^2-1)/12}
  double lg = -std::log(2.0 * M_PI) + std::lgamma(N + 1.0);
  for (int p = 1; p < N; ++p) lg += std::lgamma(p + 1.0);
  lg += 0.5 * N * std::log(2.0 * M_PI) + 0.5 * N * N * std::log(2.0 * t);
  lg += 0.5 * (std::log(M_PI) - std::log(t * N));
  lg += t * N * (double(N) * N - 1) / 12.0;
  return lg;
}

double log_group_volume_factor(int N) {
  double lg = (N * (N - 1) / 2 + 1) * std::log(2.0 * M_PI);
  for (int p = 1; p <= N; ++p) lg -= std::lgamma(p + 1.0);
  return lg;
}

Eigen::MatrixXd hyperplane_frame(int N) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) -
                      Eigen::MatrixXd::Constant(N, N, 1.0 / N);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.leftCols(N - 1);
}

McmcChain::McmcChain(const HeatParams& params, const McmcOptions& opts, uint64_t chain_index)
    : params_(params), opts_(opts), frame_(hyperplane_frame(params.N)),
      rng_(make_engine(opts.seed, 0x6d636d63ULL, chain_index)) {
  const double t = params_.effective_t();
  state_.seed = derive_seed(opts.seed, 0x6d636d63ULL, chain_index);
  state_.step_size = opts_.step > 0.0 ? opts_.step : std::sqrt(t);
  // start at the density maximum lambda = 2 t delta_N
  xi_ = frame_.transpose() * (2.0 * t * delta_vector(params_.N));
  cur_logp_ = eigen_log_density(frame_ * xi_, params_);

  long acc_window = 0;
  for (int s = 1; s <= opts_.burnin; ++s) {
    long before = state_.accepted;
    metropolis_step();
    acc_window += state_.accepted - before;
    if (s % opts_.tune_interval == 0) {
      double rate = double(acc_window) / opts_.tune_interval;
      if (rate > opts_.target_accept + 0.10) state_.step_size *= 1.4;
      else if (rate < opts_.target_accept - 0.10) state_.step_size /= 1.4;
      acc_window = 0;
    }
  }
  state_.steps = 0;
  state_.accepted = 0;
}

void McmcChain::metropolis_step() {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::VectorXd prop = xi_;
  for (int i = 0; i < prop.size(); ++i) prop(i) += state_.step_size * n01(rng_);
  double lp = eigen_log_density(frame_ * prop, params_);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  if (std::log(u01(rng_)) < lp - cur_logp_) {
    xi_ = prop;
    cur_logp_ = lp;
    ++state_.accepted;
  }
  ++state_.steps;
  state_.lambda = frame_ * xi_;
}

const Eigen::VectorXd& McmcChain::next() {
  for (int i = 0; i < opts_.thin; ++i) metropolis_step();
  lambda_ = frame_ * xi_;
  return lambda_;
}

Eigen::MatrixXcd haar_unitary(int N, std::mt19937_64& rng) {
  Eigen::MatrixXcd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) G(i, j) = complex_gaussian(rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    Complex d = R(j, j);
    Q.col(j) *= (d == Complex(0)) ? Complex(1) : d / std::abs(d);
  }
  return Q;
}

void mcmc_sample(const HeatParams& params, long n, const McmcOptions& opts,
                 const std::function<void(const PolarSample&, long)>& sink,
                 ChainState* chain_state) {
  McmcChain chain(params, opts);
  auto rng = make_engine(opts.seed, 0x68616172ULL);
  PolarSample s;
  for (long i = 0; i < n; ++i) {
    Eigen::VectorXd lam = chain.next();
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<double>());
    s.lambda = lam;
    s.U = haar_unitary(params.N, rng);
    sink(s, i);
  }
  if (chain.state().acceptance_rate() < 0.05)
    throw std::runtime_error("mcmc_sample: acceptance below 5% after tuning");
  if (chain_state) *chain_state = chain.state();
}

std::vector<PolarSample> mcmc_sample(const HeatParams& params, long n,
                                     const McmcOptions& opts) {
  std::vector<PolarSample> out;
  out.reserve(n);
  mcmc_sample(params, n, opts, [&](const PolarSample& s, long) { out.push_back(s); });
  return out;
}

int default_brownian_steps(double t) {
  return std::max(100, static_cast<int>(std::ceil(50.0 * t)));
}

PositiveMatrix brownian_sample(const HeatParams& params, int steps, std::mt19937_64& rng) {
  const int N = params.N;
  const double t = params.effective_t();
  if (steps < 1) throw std::invalid_argument("brownian_sample: steps >= 1");
  const double h = t / steps;
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Identity(N, N);
  for (int m = 0; m < steps; ++m) {
    Eigen::MatrixXcd W(N, N);
    for (int i = 0; i < N; ++i) {
      W(i, i) = n01(rng);
      for (int j = i + 1; j < N; ++j) {
        Complex v(n01(rng), n01(rng));
        W(i, j) = v / std::sqrt(2.0);
        W(j, i) = std::conj(W(i, j));
      }
    }
    Complex tr = W.trace() / double(N);
    for (int i = 0; i < N; ++i) W(i, i) -= tr;
    W *= std::sqrt(2.0 * h);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esx(X);
    Eigen::MatrixXcd sq = esx.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esw(W);
    Eigen::VectorXd ew = esw.eigenvalues();
    Eigen::MatrixXcd eW = esw.eigenvectors() *
                          ew.array().exp().matrix().asDiagonal() *
                          esw.eigenvectors().adjoint();
    X = sq * eW * sq;
    X = 0.5 * (X + X.adjoint()).eval();
    if (!X.allFinite())
      throw std::runtime_error("brownian_sample: non-finite matrix exponential; reduce step size");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esn(X, Eigen::EigenvaluesOnly);
    double logdet = esn.eigenvalues().array().log().sum();
    X *= std::exp(-logdet / N);
  }
  return PositiveMatrix::normalized(X);
}

ConcentrationReport concentration_report(const PolarSample& sample, const HeatParams& params) {
  ConcentrationReport r;
  Eigen::VectorXd lam = sample.lambda;
  std::sort(lam.data(), lam.data() + lam.size());  // ascending, to match delta_N
  Eigen::VectorXd d = delta_vector(params.N);
  r.radius = lam.norm();
  r.expected_radius = 2.0 * d.norm() * params.effective_t();
  double c = (r.radius > 0.0) ? lam.dot(d) / (r.radius * d.norm()) : 1.0;
  r.angle = std::acos(std::clamp(c, -1.0, 1.0));
  return r;
}

void write_polar_record(std::ostream& os, const PolarSample& s) {
  uint32_t n = static_cast<uint32_t>(s.lambda.size());
  uint64_t bytes = sizeof(uint32_t) + n * sizeof(double) + 2ull * n * n * sizeof(double);
  os.write(reinterpret_cast<const char*>(&bytes), sizeof(bytes));
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  os.write(reinterpret_cast<const char*>(s.lambda.data()), n * sizeof(double));
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) {
      double re = s.U(i, j).real(), im = s.U(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof(re));
      os.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
}

bool read_polar_record(std::istream& is, PolarSample& s) {
  uint64_t bytes = 0;
  if (!is.read(reinterpret_cast<char*>(&bytes), sizeof(bytes))) return false;
  uint32_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  s.lambda.resize(n);
  is.read(reinterpret_cast<char*>(s.lambda.data()), n * sizeof(double));
  s.U.resize(n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) {
      double re, im;
      is.read(reinterpret_cast<char*>(&re), sizeof(re));
      is.read(reinterpret_cast<char*>(&im), sizeof(im));
      s.U(i, j) = Complex(re, im);
    }
  return bool(is);
}

}  // namespace bergman
