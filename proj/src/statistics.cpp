#include "bergman/statistics.hpp"

#include "bergman/oracle.hpp"
#include "bergman/parallel.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bergman {

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double sample_variance(const std::vector<double>& x) {
  double m = mean(x), s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

double batch_means_se(const std::vector<double>& x) {
  const long n = static_cast<long>(x.size());
  if (n < 4) return std::sqrt(sample_variance(x) / n);
  long m = static_cast<long>(std::floor(std::sqrt(double(n))));
  long b = n / m;
  std::vector<double> bm(m);
  for (long i = 0; i < m; ++i) {
    double s = 0.0;
    for (long j = i * b; j < (i + 1) * b; ++j) s += x[j];
    bm[i] = s / b;
  }
  return std::sqrt(sample_variance(bm) / m);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double ks_statistic_normal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const long n = static_cast<long>(x.size());
  double d = 0.0;
  for (long i = 0; i < n; ++i) {
    double c = normal_cdf(x[i]);
    d = std::max(d, std::max(std::abs((i + 1.0) / n - c), std::abs(c - double(i) / n)));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

double RadialFunction::laplacian_norm_sq() const {
  auto r = quad::adaptive_gk([this](double u) {
    double l = laplacian_u(u);
    return l * l;
  }, 0.0, 1.0, 1e-12, 1e-12);
  return M_PI * r.value;
}

RadialFunction radial_function(const std::string& name) {
  if (name == "one")
    return {"one", [](double) { return 1.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; }};
  if (name == "height")
    return {"height", [](double u) { return 1.0 - u; }, [](double) { return -1.0; },
            [](double) { return 0.0; }};
  if (name == "bump")
    return {"bump", [](double u) { return u * u * (1.0 - u) * (1.0 - u); },
            [](double u) { return 2.0 * u - 6.0 * u * u + 4.0 * u * u * u; },
            [](double u) { return 2.0 - 12.0 * u + 12.0 * u * u; }};
  throw std::invalid_argument("radial_function: unknown name " + name);
}

double SetRegion::boundary_length() const {
  auto circ = [](double u) { return 2.0 * M_PI * std::sqrt(u * (1.0 - u)); };
  double len = 0.0;
  if (u_lo > 0.0) len += circ(u_lo);
  if (u_hi < 1.0) len += circ(u_hi);
  return len;
}

bool SetRegion::contains(const Point& p) const {
  double u = area_coord(p);
  if (u_hi >= 1.0) return u >= u_lo;
  return u >= u_lo && u < u_hi;
}

LinearStatistic LinearStatistic::smooth(RadialFunction fn) {
  LinearStatistic s;
  s.kind = Kind::smooth;
  s.f = std::move(fn);
  return s;
}

LinearStatistic LinearStatistic::set(SetRegion r) {
  LinearStatistic s;
  s.kind = Kind::set;
  s.region = r;
  return s;
}

double linear_statistic_value(const LinearStatistic& stat, const SectionBasis& basis,
                              const Eigen::MatrixXcd& rot, const Eigen::VectorXd& logw,
                              double tol) {
  auto density = [&](double u, double th) {
    return metric_density_invariant(basis, rot, logw, point_from_area_coord(u, th));
  };
  if (stat.kind == LinearStatistic::Kind::smooth) {
    auto r = quad::integrate_rect(
        [&](double u, double th) { return stat.f.g(u) * density(u, th); }, tol);
    if (!r.converged)
      throw std::runtime_error("linear_statistic_value: quadrature tolerance failure");
    return r.value;
  }
  const double lo = stat.region.u_lo, hi = stat.region.u_hi;
  auto outer = [&](double th) {
    return quad::adaptive_gk([&](double u) { return density(u, th); }, lo, hi,
                             tol / (2.0 * M_PI * 4.0), 1e-12).value;
  };
  auto r = quad::adaptive_gk(outer, 0.0, 2.0 * M_PI, tol, 1e-12);
  if (!r.converged)
    throw std::runtime_error("linear_statistic_value: quadrature tolerance failure");
  return r.value;
}

double linear_statistic_value(const LinearStatistic& stat,
                              const KahlerPotentialSample& sample,
                              const SectionBasis& basis, double tol) {
  if (basis.k != sample.k()) throw std::invalid_argument("basis/sample k mismatch");
  return linear_statistic_value(stat, basis, sample.rotation(), sample.log_weights(), tol);
}

namespace {

// n x npts matrix of psi(z) = phi_P(z) - phi_I(z) over heat-kernel samples,
// chains striped in fixed order for deterministic reductions
std::vector<double> relative_potential_samples(const HeatParams& params,
                                               const SectionBasis& basis,
                                               const std::vector<Point>& pts, long n,
                                               const McmcOptions& opts, int chains) {
  const int npts = static_cast<int>(pts.size());
  std::vector<double> vals(static_cast<size_t>(n) * npts);
  std::vector<Eigen::VectorXcd> coh(npts);
  for (int p = 0; p < npts; ++p) coh[p] = weighted_sections(basis, pts[p]);

  std::vector<long> lo(chains + 1, 0);
  for (int c = 0; c < chains; ++c) lo[c + 1] = lo[c] + n / chains + (c < n % chains ? 1 : 0);

  parallel_for(chains, [&](long c) {
    McmcOptions o = opts;
    McmcChain chain(params, o, static_cast<uint64_t>(c));
    auto hrng = make_engine(opts.seed, 0x68616172ULL, static_cast<uint64_t>(c));
    for (long i = lo[c]; i < lo[c + 1]; ++i) {
      const Eigen::VectorXd& lam = chain.next();
      Eigen::MatrixXcd U = haar_unitary(params.N, hrng);
      double lmax = lam.maxCoeff();
      for (int p = 0; p < npts; ++p) {
        Eigen::VectorXcd w = U * coh[p];
        double s = 0.0;
        for (int j = 0; j < params.N; ++j) s += std::exp(lam(j) - lmax) * std::norm(w(j));
        double lognum = lmax + std::log(s);
        vals[static_cast<size_t>(i) * npts + p] =
            (lognum - std::log(coh[p].squaredNorm())) / basis.k;
      }
    }
  });
  return vals;
}

nlohmann::json run_manifest(const HeatParams& params, long n, const McmcOptions& opts,
                            int chains) {
  return nlohmann::json{{"N", params.N},
                        {"t", params.t},
                        {"scaling", params.scaling == TimeScaling::raw ? "raw" : "mabuchi"},
                        {"k", params.k},
                        {"n", n},
                        {"seed", opts.seed},
                        {"burnin", opts.burnin},
                        {"thin", opts.thin},
                        {"chains", chains}};
}

}  // namespace

FlatnessReport one_point_flatness(const HeatParams& params, const SectionBasis& basis,
                                  const std::vector<Point>& grid, long n,
                                  const McmcOptions& opts, int chains) {
  if (grid.empty()) throw std::invalid_argument("one_point_flatness: empty grid");
  const int npts = static_cast<int>(grid.size());
  auto vals = relative_potential_samples(params, basis, grid, n, opts, chains);

  FlatnessReport rep;
  rep.grid = grid;
  auto manifest = run_manifest(params, n, opts, chains);
  std::vector<double> series(n);
  for (int p = 0; p < npts; ++p) {
    for (long i = 0; i < n; ++i) series[i] = vals[static_cast<size_t>(i) * npts + p];
    EstimatorResult er;
    er.estimate = mean(series);
    er.std_error = batch_means_se(series);
    er.n = n;
    er.manifest = manifest;
    rep.offsets.push_back(er);
    rep.pooled_offset += er.estimate / npts;
  }
  for (int p = 0; p < npts; ++p)
    for (int q = p + 1; q < npts; ++q) {
      for (long i = 0; i < n; ++i)
        series[i] = vals[static_cast<size_t>(i) * npts + p] -
                    vals[static_cast<size_t>(i) * npts + q];
      double se = batch_means_se(series);
      double z = std::abs(mean(series)) / se;
      rep.max_pairwise_z = std::max(rep.max_pairwise_z, z);
    }
  return rep;
}

TwoPointGrid make_rho_grid(const SectionBasis& basis, std::vector<double> rhos) {
  std::sort(rhos.begin(), rhos.end(), std::greater<double>());
  TwoPointGrid g;
  for (double rho : rhos) {
    if (!(rho > 0.0) || !(rho < 1.0))
      throw std::invalid_argument("make_rho_grid: rho strictly inside (0,1)");
    double r = std::sqrt(std::pow(rho, -1.0 / basis.k) - 1.0);
    PairSpec p;
    p.z1 = Point{{0.0, 0.0}, false};
    p.z2 = Point{{r, 0.0}, false};
    p.rho = berezin_rho(basis, {p.z1, p.z2}).rho;
    g.pairs.push_back(p);
  }
  return g;
}

EstimatorResult TwoPointReport::difference(int i, int j) const {
  const auto& a = products[i];
  const auto& b = products[j];
  std::vector<double> d(a.size());
  for (size_t s = 0; s < a.size(); ++s) d[s] = a[s] - b[s];
  EstimatorResult er;
  double corr = double(d.size()) / (d.size() - 1.0);
  er.estimate = mean(d) * corr;
  er.std_error = batch_means_se(d) * corr;
  er.n = static_cast<long>(d.size());
  er.manifest = covariances[i].manifest;
  return er;
}

TwoPointReport two_point_covariance(const HeatParams& params, const SectionBasis& basis,
                                    const TwoPointGrid& grid, long n,
                                    const McmcOptions& opts, int chains) {
  const int npairs = static_cast<int>(grid.pairs.size());
  if (npairs == 0) throw std::invalid_argument("two_point_covariance: empty grid");
  // nonincreasing; exact ties are allowed (rotated same-diastasis pairs)
  for (int p = 0; p + 1 < npairs; ++p)
    if (grid.pairs[p].rho < grid.pairs[p + 1].rho)
      throw std::invalid_argument("two_point_covariance: rho must be nonincreasing");
  for (const auto& pr : grid.pairs)
    if (!(pr.rho > 0.0) || !(pr.rho < 1.0))
      throw std::invalid_argument("two_point_covariance: pairs need 0 < rho < 1");

  // dedupe evaluation points (bitwise)
  std::vector<Point> pts;
  std::vector<std::pair<int, int>> pair_idx(npairs);
  auto find_pt = [&](const Point& p) {
    for (size_t i = 0; i < pts.size(); ++i)
      if (pts[i].at_infinity == p.at_infinity && pts[i].z == p.z) return static_cast<int>(i);
    pts.push_back(p);
    return static_cast<int>(pts.size() - 1);
  };
  for (int p = 0; p < npairs; ++p)
    pair_idx[p] = {find_pt(grid.pairs[p].z1), find_pt(grid.pairs[p].z2)};

  const int npts = static_cast<int>(pts.size());
  auto vals = relative_potential_samples(params, basis, pts, n, opts, chains);

  std::vector<double> m(npts, 0.0);
  for (long i = 0; i < n; ++i)
    for (int p = 0; p < npts; ++p) m[p] += vals[static_cast<size_t>(i) * npts + p];
  for (int p = 0; p < npts; ++p) m[p] /= n;

  TwoPointReport rep;
  rep.grid = grid;
  rep.chains = chains;
  rep.products.assign(npairs, std::vector<double>(n));
  auto manifest = run_manifest(params, n, opts, chains);
  const double corr = double(n) / (n - 1.0);
  for (int p = 0; p < npairs; ++p) {
    auto [i1, i2] = pair_idx[p];
    auto& prod = rep.products[p];
    for (long i = 0; i < n; ++i)
      prod[i] = (vals[static_cast<size_t>(i) * npts + i1] - m[i1]) *
                (vals[static_cast<size_t>(i) * npts + i2] - m[i2]);
    EstimatorResult er;
    er.estimate = mean(prod) * corr;
    er.std_error = batch_means_se(prod) * corr;
    er.n = n;
    er.manifest = manifest;
    er.manifest["rho"] = grid.pairs[p].rho;
    rep.covariances.push_back(er);
  }
  return rep;
}

VarianceCheck smooth_variance_check(int k, const RadialFunction& f, long n, uint64_t seed,
                                    EnsembleKind ensemble, double t) {
  VarianceCheck out;
  out.samples.resize(n);
  SectionBasis basis = build_basis(k);
  if (ensemble == EnsembleKind::zeros) {
    parallel_for(n, [&](long i) {
      auto rng = make_engine(seed, 0x7a65726fULL, static_cast<uint64_t>(i));
      GaussianSection s = sample_section(k, rng);
      ZeroSet zs = zeros_of(s, basis);
      double x = 0.0;
      for (const auto& root : zs.roots) x += f.value(root);
      out.samples[i] = x;
    });
  } else {
    if (!(t > 0.0)) throw std::invalid_argument("smooth_variance_check: heat ensemble needs t");
    HeatParams params{k + 1, t, TimeScaling::raw, k};
    McmcOptions opts;
    opts.seed = seed;
    auto stat = LinearStatistic::smooth(f);
    auto samples = mcmc_sample(params, n, opts);
    parallel_for(n, [&](long i) {
      out.samples[i] = linear_statistic_value(stat, basis, samples[i].U,
                                              samples[i].lambda, 1e-7);
    });
  }
  double v = sample_variance(out.samples);
  double m = mean(out.samples);
  double m4 = 0.0;
  for (double x : out.samples) m4 += std::pow(x - m, 4);
  m4 /= n;
  out.variance.estimate = v;
  out.variance.std_error = std::sqrt(std::max(m4 - v * v, 0.0) / n);
  out.variance.n = n;
  out.variance.manifest = {{"k", k}, {"f", f.name}, {"seed", seed}, {"n", n},
                           {"ensemble", ensemble == EnsembleKind::zeros ? "zeros" : "heat"}};
  out.predicted = oracle::riemann_zeta(3.0) / (16.0 * M_PI * k) * f.laplacian_norm_sq();
  out.ratio = v / out.predicted;
  return out;
}

double smooth_variance_zeros_exact(int k, const RadialFunction& f, int nodes) {
  std::vector<double> x, w;
  quad::gauss_legendre(nodes, x, w);
  std::vector<double> u(nodes), wu(nodes), th(nodes), wt(nodes), L(nodes);
  for (int i = 0; i < nodes; ++i) {
    u[i] = 0.5 * (x[i] + 1.0);
    wu[i] = 0.5 * w[i];
    th[i] = M_PI * (x[i] + 1.0);
    wt[i] = M_PI * w[i];
    L[i] = f.laplacian_u(u[i]);
  }
  double total = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      double base = (1.0 - u[i]) * (1.0 - u[j]) + u[i] * u[j];
      double cross = 2.0 * std::sqrt(u[i] * u[j] * (1.0 - u[i]) * (1.0 - u[j]));
      double li = 0.0;
      for (int a = 0; a < nodes; ++a) {
        double ov = std::clamp(base + cross * std::cos(th[a]), 0.0, 1.0);
        li += wt[a] * oracle::dilog(std::pow(ov, k));
      }
      total += wu[i] * wu[j] * L[i] * L[j] * li;
    }
  return total / (32.0 * M_PI);
}

NormalityReport normality_test(const std::vector<double>& samples) {
  if (samples.size() < 1000)
    throw std::invalid_argument("normality_test: need n >= 1000");
  NormalityReport rep;
  rep.n = static_cast<long>(samples.size());
  double m = mean(samples);
  double sd = std::sqrt(sample_variance(samples));
  std::vector<double> z(samples.size());
  double s3 = 0.0, s4 = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    z[i] = (samples[i] - m) / sd;
    s3 += z[i] * z[i] * z[i];
    s4 += z[i] * z[i] * z[i] * z[i];
  }
  rep.skew = s3 / samples.size();
  rep.ex_kurtosis = s4 / samples.size() - 3.0;
  rep.ks = ks_statistic_normal(z);
  return rep;
}

}  // namespace bergman
