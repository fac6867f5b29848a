#pragma once

#include "bergman/matrix_metric.hpp"
#include "bergman/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace bergman {

enum class TimeScaling { raw, mabuchi };

// Ensemble parameters. In mabuchi mode the diffusion time is eps_k^{-2} t
// with eps_k = k^{-1} N_k^{-1/2}, N_k = k+1.
struct HeatParams {
  int N = 2;
  double t = 1.0;
  TimeScaling scaling = TimeScaling::raw;
  int k = 0;  // required in mabuchi mode

  double effective_t() const;
};

// log C(t,N) of the probability normalization
// C = sqrt(N) / (2 pi (sqrt(4 pi t))^{N^2-1}) * exp(-t N(N^2-1)/12)
LogValue heat_normalization(const HeatParams& params);

// unnormalized log density of the radial part on the sum-zero hyperplane:
// log[ Delta(lambda) Delta(e^lambda) ] - sum lambda^2 / 4t   (Vandermondes
// taken positively; -inf at coincident entries)
double eigen_log_density(const Eigen::VectorXd& lambda, const HeatParams& params);

// closed form of Z_delta(t,N) = Int delta(sum lambda) Delta(lambda) Delta(e^lambda)
//   e^{-|lambda|^2/4t} prod dlambda  (via the Gaussian-Vandermonde identity)
double log_radial_partition(int N, double t);
// group-volume factor V_N with C(t,N) * V_N * Z_delta = 1
double log_group_volume_factor(int N);

// orthonormal frame of the sum-zero hyperplane (N x (N-1))
Eigen::MatrixXd hyperplane_frame(int N);

struct McmcOptions {
  int burnin = 2000;
  int thin = 10;
  double step = 0.0;          // 0: auto sqrt(t), then tuned
  double target_accept = 0.30;
  int tune_interval = 100;
  uint64_t seed = 1;
};

struct ChainState {
  Eigen::VectorXd lambda;     // current point (unsorted)
  long steps = 0;
  long accepted = 0;
  double step_size = 0.0;
  uint64_t seed = 0;

  double acceptance_rate() const { return steps ? double(accepted) / steps : 0.0; }
};

// Metropolis random walk on the hyperplane targeting eigen_log_density.
class McmcChain {
 public:
  McmcChain(const HeatParams& params, const McmcOptions& opts, uint64_t chain_index = 0);

  // advance `thin` steps and return the current eigenvalue vector
  const Eigen::VectorXd& next();
  const ChainState& state() const { return state_; }

 private:
  void metropolis_step();

  HeatParams params_;
  McmcOptions opts_;
  Eigen::MatrixXd frame_;
  Eigen::VectorXd xi_;        // hyperplane coordinates
  double cur_logp_;
  ChainState state_;
  std::mt19937_64 rng_;
  mutable Eigen::VectorXd lambda_;
};

struct PolarSample {
  Eigen::VectorXd lambda;     // descending
  Eigen::MatrixXcd U;
};

// Haar unitary via QR of a complex Ginibre matrix with the R-diagonal phase fix
Eigen::MatrixXcd haar_unitary(int N, std::mt19937_64& rng);

// stream n samples of (lambda, U); lambda from the MCMC radial chain, U Haar.
// chain_state, when given, receives the tuned step size / acceptance counters.
void mcmc_sample(const HeatParams& params, long n, const McmcOptions& opts,
                 const std::function<void(const PolarSample&, long index)>& sink,
                 ChainState* chain_state = nullptr);
std::vector<PolarSample> mcmc_sample(const HeatParams& params, long n,
                                     const McmcOptions& opts);

// geodesic random walk X <- X^{1/2} exp(sqrt(h) W) X^{1/2}, h = t/steps,
// W traceless Hermitian with per-coordinate variance 2 in the orthonormal
// Cartan-Killing frame; det renormalized each step
PositiveMatrix brownian_sample(const HeatParams& params, int steps, std::mt19937_64& rng);
int default_brownian_steps(double t);

struct ConcentrationReport {
  double radius = 0.0;           // |lambda|_2
  double angle = 0.0;            // angle(sorted lambda, delta_N)
  double expected_radius = 0.0;  // 2 |delta_N| t
};

ConcentrationReport concentration_report(const PolarSample& sample, const HeatParams& params);

// length-prefixed binary record stream (lambda then U, row-major re/im)
void write_polar_record(std::ostream& os, const PolarSample& s);
bool read_polar_record(std::istream& is, PolarSample& s);

}  // namespace bergman
