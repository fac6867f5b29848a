#include "bergman/experiments.hpp"
#include "bergman/geometry.hpp"
#include "bergman/heat_sampler.hpp"
#include "bergman/oracle.hpp"
#include "bergman/statistics.hpp"
#include "bergman/zeros.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bergman;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join_args(int argc, char** argv) {
  std::ostringstream os;
  for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
  return os.str();
}

Eigen::VectorXd parse_vector(const std::string& csv) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
}

void write_manifest(const std::string& path, json manifest, double wall_s) {
  manifest["wall_time_s"] = wall_s;
  std::ofstream os(path);
  os << manifest.dump(2) << "\n";
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);  // our own pool does the threading
  CLI::App app{"heat-kernel random Bergman metrics laboratory"};
  app.require_subcommand(1);
  const std::string cmdline = join_args(argc, argv);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "draw heat-kernel samples");
  int s_N = 3, s_k = 0, s_steps = 0, s_burnin = 2000, s_thin = 10;
  double s_t = 1.0;
  long s_n = 100;
  uint64_t s_seed = 1;
  std::string s_mode = "mcmc", s_out = "samples.jsonl", s_scaling = "raw", s_format = "jsonl";
  sample->add_option("--N", s_N, "matrix size");
  sample->add_option("--t", s_t, "diffusion time");
  sample->add_option("--k", s_k, "tensor power (for mabuchi scaling)");
  sample->add_option("--mode", s_mode)->check(CLI::IsMember({"mcmc", "brownian"}));
  sample->add_option("--n", s_n, "sample count");
  sample->add_option("--seed", s_seed);
  sample->add_option("--out", s_out);
  sample->add_option("--scaling", s_scaling)->check(CLI::IsMember({"raw", "mabuchi"}));
  sample->add_option("--format", s_format)->check(CLI::IsMember({"jsonl", "bin"}));
  sample->add_option("--steps", s_steps, "brownian steps (0: default)");
  sample->add_option("--burnin", s_burnin);
  sample->add_option("--thin", s_thin);

  // ---- oracle ----
  auto* orc = app.add_subcommand("oracle", "analytic oracle evaluations");
  orc->require_subcommand(1);
  auto* drho = orc->add_subcommand("d-rho", "d/drho of the bi-potential");
  double o_t = 1.0, o_rho = 0.5, o_tol = 1e-9;
  drho->add_option("--t", o_t)->required();
  drho->add_option("--rho", o_rho)->required();
  drho->add_option("--tol", o_tol);
  auto* dlg = orc->add_subcommand("dilog", "Li2");
  double d_rho_arg = 0.5;
  dlg->add_option("--rho", d_rho_arg)->required();
  auto* srho = orc->add_subcommand("small-rho", "rho -> 0 integral (= 2t)");
  double sr_t = 1.0, sr_tol = 1e-10;
  srho->add_option("--t", sr_t)->required();
  srho->add_option("--tol", sr_tol);
  auto* hz = orc->add_subcommand("hciz", "HCIZ determinant formula");
  std::string h_a = "1,0", h_b = "1,0";
  double h_mu = 1.0;
  hz->add_option("--a", h_a)->required();
  hz->add_option("--b", h_b)->required();
  hz->add_option("--mu", h_mu);
  auto* ident = orc->add_subcommand("identity", "Gaussian-Vandermonde identity");
  std::string i_mu = "1,-1";
  double i_t = 1.0;
  ident->add_option("--mu", i_mu)->required();
  ident->add_option("--t", i_t);

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimators");
  est->require_subcommand(1);
  auto* twop = est->add_subcommand("two-point", "covariance of the potential vs oracle");
  int e_k = 8;
  double e_t = 1.0;
  long e_n = 100000;
  uint64_t e_seed = 42;
  std::string e_rhos = "0.6,0.3", e_out = "";
  twop->add_option("--k", e_k);
  twop->add_option("--t", e_t);
  twop->add_option("--rhos", e_rhos, "comma list, decreasing");
  twop->add_option("--n", e_n);
  twop->add_option("--seed", e_seed);
  twop->add_option("--out", e_out, "CSV path");
  auto* onep = est->add_subcommand("one-point", "flatness of E[phi_P - phi_I]");
  int p_k = 4, p_grid = 12;
  double p_t = 1.0;
  long p_n = 10000;
  uint64_t p_seed = 42;
  onep->add_option("--k", p_k);
  onep->add_option("--t", p_t);
  onep->add_option("--n", p_n);
  onep->add_option("--seed", p_seed);
  onep->add_option("--grid", p_grid);
  auto* var = est->add_subcommand("variance", "smooth linear statistic variance");
  int v_k = 128;
  std::string v_ens = "zeros", v_f = "height";
  long v_n = 10000;
  uint64_t v_seed = 42;
  double v_t = 0.0;
  var->add_option("--k", v_k);
  var->add_option("--ensemble", v_ens)->check(CLI::IsMember({"zeros", "heat"}));
  var->add_option("--f", v_f);
  var->add_option("--n", v_n);
  var->add_option("--seed", v_seed);
  var->add_option("--t", v_t);

  // ---- zeros ----
  auto* zr = app.add_subcommand("zeros", "Gaussian random sections and their zeros");
  zr->require_subcommand(1);
  auto* zsample = zr->add_subcommand("sample", "roots of random sections (CSV)");
  int z_k = 16;
  long z_n = 10;
  uint64_t z_seed = 1;
  std::string z_out = "roots.csv";
  zsample->add_option("--k", z_k);
  zsample->add_option("--n", z_n);
  zsample->add_option("--seed", z_seed);
  zsample->add_option("--out", z_out);
  auto* znv = zr->add_subcommand("number-variance", "zero count variance in a region");
  int nv_k = 256;
  long nv_n = 20000;
  uint64_t nv_seed = 42;
  std::string nv_set = "hemisphere";
  znv->add_option("--k", nv_k);
  znv->add_option("--set", nv_set)->check(CLI::IsMember({"hemisphere", "cap"}));
  znv->add_option("--n", nv_n);
  znv->add_option("--seed", nv_seed);

  // ---- boundary ----
  auto* bd = app.add_subcommand("boundary", "geodesic-ray degeneration");
  bd->require_subcommand(1);
  auto* ray = bd->add_subcommand("ray", "L1 convergence along a ray");
  int r_k = 4;
  std::string r_times = "1,2,4,8";
  uint64_t r_seed = 42;
  ray->add_option("--k", r_k);
  ray->add_option("--times", r_times);
  ray->add_option("--seed", r_seed);
  auto* weak = bd->add_subcommand("weak-limit", "pairing against the zero measure");
  int w_k = 4;
  double w_s = 50.0;
  uint64_t w_seed = 42;
  weak->add_option("--k", w_k);
  weak->add_option("--s", w_s);
  weak->add_option("--seed", w_seed);

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a named experiment from a JSON config");
  std::string run_config, run_out = "results";
  long run_n = -1;
  int64_t run_seed = -1;
  run->add_option("--config", run_config)->required();
  run->add_option("--out", run_out);
  run->add_option("--n", run_n, "override the config sample count");
  run->add_option("--seed", run_seed, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Timer timer;
  try {
    if (*sample) {
      HeatParams params{s_N, s_t,
                        s_scaling == "raw" ? TimeScaling::raw : TimeScaling::mabuchi, s_k};
      std::ofstream os(s_out, s_format == "bin" ? std::ios::binary : std::ios::out);
      if (!os) throw std::runtime_error("cannot open " + s_out);
      auto emit = [&](const PolarSample& ps, long) {
        if (s_format == "bin") {
          write_polar_record(os, ps);
          return;
        }
        json rec;
        rec["lambda"] = std::vector<double>(ps.lambda.data(), ps.lambda.data() + ps.lambda.size());
        json u = json::array();
        for (int i = 0; i < ps.U.rows(); ++i)
          for (int j = 0; j < ps.U.cols(); ++j)
            u.push_back({ps.U(i, j).real(), ps.U(i, j).imag()});
        rec["U"] = u;
        os << rec.dump() << "\n";
      };
      ChainState chain_state;
      if (s_mode == "mcmc") {
        McmcOptions opts;
        opts.seed = s_seed;
        opts.burnin = s_burnin;
        opts.thin = s_thin;
        mcmc_sample(params, s_n, opts, emit, &chain_state);
      } else {
        int steps = s_steps > 0 ? s_steps : default_brownian_steps(params.effective_t());
        for (long i = 0; i < s_n; ++i) {
          auto rng = make_engine(s_seed, 0x62726f77ULL, i);
          PositiveMatrix X = brownian_sample(params, steps, rng);
          PolarCoords pc = polar_decompose(X);
          emit(PolarSample{pc.lambda, pc.U}, i);
        }
      }
      json manifest = experiments::base_manifest(cmdline);
      manifest["params"] = {{"N", s_N}, {"t", s_t}, {"k", s_k},   {"mode", s_mode},
                            {"n", s_n}, {"seed", s_seed}, {"scaling", s_scaling},
                            {"burnin", s_burnin}, {"thin", s_thin}, {"steps", s_steps}};
      if (s_mode == "mcmc")
        manifest["tuning"] = {{"step_size", chain_state.step_size},
                              {"acceptance_rate", chain_state.acceptance_rate()}};
      write_manifest(s_out + ".manifest.json", manifest, timer.seconds());
      std::cout << "wrote " << s_n << " samples to " << s_out << "\n";
    } else if (*drho) {
      oracle::BiPotentialQuery q{o_t, o_rho, o_tol};
      auto rep = oracle::d_rho_bipotential(q);
      std::cout << json{{"value", rep.value},
                        {"abs_error_estimate", rep.abs_error_estimate},
                        {"evaluations", rep.evaluations}}.dump() << "\n";
    } else if (*dlg) {
      std::cout << json{{"value", oracle::dilog(d_rho_arg)}}.dump() << "\n";
    } else if (*srho) {
      auto rep = oracle::small_rho_integral(sr_t, sr_tol);
      std::cout << json{{"value", rep.value},
                        {"abs_error_estimate", rep.abs_error_estimate},
                        {"evaluations", rep.evaluations}}.dump() << "\n";
    } else if (*hz) {
      double v = oracle::hciz(parse_vector(h_a), parse_vector(h_b), h_mu);
      std::cout << json{{"value", v}}.dump() << "\n";
    } else if (*ident) {
      auto [lhs, rhs] = oracle::gaussian_vandermonde_identity(parse_vector(i_mu), i_t);
      std::cout << json{{"lhs", lhs}, {"rhs", rhs}, {"ratio", lhs / rhs}}.dump() << "\n";
    } else if (*twop) {
      SectionBasis basis = build_basis(e_k);
      HeatParams params{e_k + 1, e_t, TimeScaling::raw, e_k};
      McmcOptions opts;
      opts.seed = e_seed;
      Eigen::VectorXd rhos = parse_vector(e_rhos);
      TwoPointGrid grid =
          make_rho_grid(basis, std::vector<double>(rhos.data(), rhos.data() + rhos.size()));
      auto rep = two_point_covariance(params, basis, grid, e_n, opts);
      std::ostringstream csv;
      csv << "pair,rho,cov,se\n";
      for (size_t p = 0; p < grid.pairs.size(); ++p)
        csv << p << "," << grid.pairs[p].rho << "," << rep.covariances[p].estimate << ","
            << rep.covariances[p].std_error << "\n";
      std::cout << csv.str();
      json summary;
      summary["pairs"] = grid.pairs.size();
      if (grid.pairs.size() >= 2) {
        auto diff = rep.difference(0, static_cast<int>(grid.pairs.size()) - 1);
        double pred = oracle::bipotential_integral(e_t, grid.pairs.back().rho,
                                                   grid.pairs.front().rho, 1e-8)
                          .value /
                      (double(e_k) * e_k);
        summary["cov_diff"] = diff.estimate;
        summary["cov_diff_se"] = diff.std_error;
        summary["oracle_diff"] = pred;
      }
      std::cout << summary.dump() << "\n";
      if (!e_out.empty()) {
        std::ofstream os(e_out);
        os << csv.str();
        json manifest = experiments::base_manifest(cmdline);
        manifest["params"] = rep.covariances[0].manifest;
        write_manifest(e_out + ".manifest.json", manifest, timer.seconds());
      }
    } else if (*onep) {
      SectionBasis basis = build_basis(p_k);
      HeatParams params{p_k + 1, p_t, TimeScaling::raw, p_k};
      McmcOptions opts;
      opts.seed = p_seed;
      std::vector<Point> grid;
      for (int i = 0; i < p_grid; ++i)
        grid.push_back(point_from_area_coord((i % 4) * 0.25 + 0.125,
                                             2.0 * M_PI * (i / 4) / std::max(1, p_grid / 4)));
      auto rep = one_point_flatness(params, basis, grid, p_n, opts);
      std::cout << json{{"offset", rep.pooled_offset},
                        {"max_pairwise_z", rep.max_pairwise_z}}.dump() << "\n";
    } else if (*var) {
      auto f = radial_function(v_f);
      auto check = smooth_variance_check(v_k, f, v_n, v_seed,
                                         v_ens == "zeros" ? EnsembleKind::zeros
                                                          : EnsembleKind::heat, v_t);
      std::cout << json{{"variance", check.variance.estimate},
                        {"se", check.variance.std_error},
                        {"predicted", check.predicted},
                        {"ratio", check.ratio}}.dump() << "\n";
    } else if (*zsample) {
      SectionBasis basis = build_basis(z_k);
      std::ofstream os(z_out);
      if (!os) throw std::runtime_error("cannot open " + z_out);
      os << "sample,re,im,at_infinity\n";
      for (long i = 0; i < z_n; ++i) {
        auto rng = make_engine(z_seed, 0x726f6f74ULL, i);
        ZeroSet zs = zeros_of(sample_section(z_k, rng), basis);
        for (const auto& root : zs.roots)
          os << i << "," << root.z.real() << "," << root.z.imag() << ","
             << (root.at_infinity ? 1 : 0) << "\n";
      }
      json manifest = experiments::base_manifest(cmdline);
      manifest["params"] = {{"k", z_k}, {"n", z_n}, {"seed", z_seed}};
      write_manifest(z_out + ".manifest.json", manifest, timer.seconds());
      std::cout << "wrote roots of " << z_n << " sections to " << z_out << "\n";
    } else if (*znv) {
      SetRegion region = nv_set == "hemisphere" ? SetRegion{0.0, 0.5} : SetRegion{0.0, 0.25};
      auto res = number_variance(nv_k, region, nv_n, nv_seed);
      std::cout << json{{"variance", res.variance.estimate},
                        {"se", res.variance.std_error},
                        {"predicted", res.predicted},
                        {"mean_count", res.mean_count}}.dump() << "\n";
    } else if (*ray) {
      SectionBasis basis = build_basis(r_k);
      RayDirection rd;
      rd.lambda = delta_vector(r_k + 1).reverse();
      auto rng = make_engine(r_seed, 0x72617921ULL);
      rd.U = haar_unitary(r_k + 1, rng);
      Eigen::VectorXd times = parse_vector(r_times);
      auto d = l1_convergence(rd, basis, std::vector<double>(times.data(), times.data() + times.size()));
      json out = json::array();
      for (size_t i = 0; i < d.size(); ++i) out.push_back({{"s", times(i)}, {"l1", d[i]}});
      std::cout << out.dump() << "\n";
    } else if (*weak) {
      SectionBasis basis = build_basis(w_k);
      RayDirection rd;
      rd.lambda = delta_vector(w_k + 1).reverse();
      auto rng = make_engine(w_seed, 0x72617921ULL);
      rd.U = haar_unitary(w_k + 1, rng);
      double d = weak_limit_check(rd, basis, radial_function("bump"), w_s);
      std::cout << json{{"difference", d}}.dump() << "\n";
    } else if (*run) {
      std::ifstream is(run_config);
      if (!is) {
        std::cerr << "config not readable: " << run_config << "\n";
        return 2;
      }
      json config;
      try {
        config = json::parse(is);
      } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
      }
      if (run_n >= 0) config["n"] = run_n;
      if (run_seed >= 0) config["seed"] = run_seed;
      experiments::ExperimentResult res;
      try {
        res = experiments::run_experiment(config);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      fs::create_directories(run_out);
      for (const auto& [name, body] : res.files) {
        std::ofstream os(fs::path(run_out) / name);
        os << body;
      }
      for (const auto& c : res.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.text << "\n";
      json manifest = experiments::base_manifest(cmdline);
      manifest["experiment"] = res.name;
      manifest["config"] = config;
      manifest["data"] = res.data;
      manifest["pass"] = res.pass;
      write_manifest((fs::path(run_out) / (res.name + ".manifest.json")).string(), manifest,
                     timer.seconds());
      return res.pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
