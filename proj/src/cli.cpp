#include "ibd/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "ibd/chain.hpp"
#include "ibd/config.hpp"
#include "ibd/diffusion.hpp"
#include "ibd/error.hpp"
#include "ibd/experiments.hpp"
#include "ibd/fluid.hpp"
#include "ibd/format.hpp"
#include "ibd/simulate.hpp"
#include "ibd/spectral.hpp"

namespace ibd {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string graph;
  std::string family;
  std::optional<int> size;
};

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

Config load_config(const CommonOptions& o, bool required) {
  Config c = o.config.empty() ? Config::parse("schema=1\n") : Config::load(o.config);
  if (o.config.empty() && required) throw ConfigError("missing --config file");
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  if (o.alpha) c.set("alpha", format_double(*o.alpha));
  if (o.beta) c.set("beta", format_double(*o.beta));
  if (!o.graph.empty()) c.set("graph", fs::absolute(o.graph).string());
  if (!o.family.empty()) c.set("family", o.family);
  if (o.size) c.set("size", std::to_string(*o.size));
  return c;
}

Configuration to_configuration(const Vector& v, const std::string& field) {
  Configuration xi(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != std::round(v(i))) {
      throw ConfigError("field '" + field + "': entry " + std::to_string(i) + " is not an integer");
    }
    xi[i] = static_cast<Spin>(v(i));
  }
  return xi;
}

std::string join(const Configuration& xi) {
  std::string s;
  for (std::size_t i = 0; i < xi.size(); ++i) s += (i ? "," : "") + std::to_string(xi[i]);
  return s;
}

std::string summary_table(const ConvergenceTable& table, const std::string& statistic) {
  std::ostringstream s;
  s << "levels=" << table.levels.size();
  if (statistic.empty()) {
    s << " coarsest_error=" << format_double(table.level_error(table.levels.front().level))
      << " finest_error=" << format_double(table.level_error(table.levels.back().level));
  } else {
    const auto rows = table.rows_for(statistic);
    s << " coarsest_" << statistic << "=" << format_double(rows.front().empirical) << " finest_"
      << statistic << "=" << format_double(rows.back().empirical);
  }
  std::uint64_t hits = 0;
  for (const auto& l : table.levels) hits += l.boundary_hits;
  s << " boundary_hits=" << hits;
  return s.str();
}

using Handler = std::function<std::string(const CommonOptions&)>;

std::string cmd_simulate(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ChainSpec spec = config_chain(c, "simulate");
  const Configuration x0 = c.has("simulate", "initial")
                               ? to_configuration(c.get_vector("simulate", "initial"), "initial")
                               : Configuration(spec.num_vertices(), 0);
  const double t_end = c.get_double("simulate", "t_end");
  if (!(t_end >= 0.0)) throw ConfigError("field 't_end' must be >= 0");
  const Trajectory traj = simulate(spec, x0, t_end, c.get_uint("simulate", "seed", 1));
  write_file(o.out_dir, "trajectory.csv", trajectory_csv(traj));
  return "events=" + std::to_string(traj.events.size()) + " final=" + join(replay(spec, traj));
}

std::string cmd_stationary(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ChainSpec spec = config_chain(c, "stationary");
  const Vector pi = stationary_solve(spec);
  const RateMatrix q = build_generator(spec);
  write_file(o.out_dir, "stationary.csv", distribution_csv(spec, pi));
  return "states=" + std::to_string(pi.size()) +
         " residual=" + format_double((q.transpose() * pi).cwiseAbs().maxCoeff());
}

std::string cmd_gibbs(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ChainSpec spec = config_chain(c, "gibbs");
  const GibbsDistribution mu = gibbs_measure(spec);
  write_file(o.out_dir, "gibbs.csv", distribution_csv(spec, mu.probabilities));
  return "states=" + std::to_string(mu.probabilities.size()) +
         " log_partition=" + format_double(mu.log_partition);
}

std::string cmd_balance(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ChainSpec spec = config_chain(c, "balance-check");
  const double residual = check_detailed_balance(spec);
  write_file(o.out_dir, "balance.csv", "max_residual\n" + format_double(residual) + "\n");
  return "residual=" + format_double(residual);
}

std::string report_summary(const SpectralReport& r) {
  return std::string("pd=") + (r.positive_definite ? "true" : "false") +
         " min_eig=" + format_double(r.min_eigenvalue()) + " method=" + to_string(r.method);
}

std::string cmd_spectrum(const CommonOptions& o) {
  const Config c = load_config(o, false);
  const double alpha = c.get_double("spectrum", "alpha");
  const double beta = c.get_double("spectrum", "beta");
  const std::string family = c.find("spectrum", "family").value_or("graph");
  SpectralReport r;
  if (family == "star") {
    r = star_spectrum(static_cast<int>(c.get_int("spectrum", "size")), alpha, beta);
  } else if (family == "path") {
    r = path_spectrum(static_cast<int>(c.get_int("spectrum", "size")), alpha, beta);
  } else if (family == "graph") {
    const Graph g = config_graph(c, "spectrum");
    auto ev = eigen_sym(negated_drift(g, alpha, beta));
    r.eigenvalues = ev;
    r.method = SpectralMethod::numeric;
    r.positive_definite = ev.front() > kPdTolerance;
    r.boundary = std::abs(ev.front()) <= kPdTolerance;
  } else {
    throw ConfigError("field 'family': expected star, path or graph, got '" + family + "'");
  }
  write_file(o.out_dir, "spectrum.csv", spectral_report_csv(r));
  write_file(o.out_dir, "eigenvalues.csv", eigenvalues_csv(r));
  return report_summary(r);
}

std::string cmd_classify(const CommonOptions& o) {
  const Config c = load_config(o, false);
  const Graph g = config_graph(c, "classify");
  const SpectralReport r =
      classify_pd(g, c.get_double("classify", "alpha"), c.get_double("classify", "beta"));
  write_file(o.out_dir, "classify.csv", spectral_report_csv(r));
  write_file(o.out_dir, "eigenvalues.csv", eigenvalues_csv(r));
  return report_summary(r) + " boundary=" + (r.boundary ? "true" : "false");
}

std::string cmd_exp_diffusion(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ConvergenceTable t =
      run_diffusion_experiment(config_experiment(c, "exp-diffusion", Regime::diffusion));
  write_file(o.out_dir, "table.csv", convergence_csv(t));
  write_file(o.out_dir, "levels.csv", levels_csv(t));
  return summary_table(t, "");
}

std::string cmd_exp_fluid(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ConvergenceTable t = run_fluid_experiment(config_experiment(c, "exp-fluid", Regime::fluid));
  write_file(o.out_dir, "table.csv", convergence_csv(t));
  write_file(o.out_dir, "levels.csv", levels_csv(t));
  return summary_table(t, "sup_distance");
}

std::string cmd_gen_check(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const ConvergenceTable t = generator_convergence_check(config_generator_check(c, "gen-check"));
  write_file(o.out_dir, "table.csv", convergence_csv(t));
  return "levels=" + std::to_string(t.levels.size()) + " coarsest_generator_error=" +
         format_double(t.rows_for("generator_error").front().empirical) +
         " finest_generator_error=" + format_double(t.rows_for("generator_error").back().empirical);
}

DriftMatrix config_drift(const Config& c, const std::string& section) {
  const Graph g = config_graph(c, section);
  return DriftMatrix(validate_interaction(g, c.get_matrix(section, "birth")),
                     validate_interaction(g, c.get_matrix(section, "death")));
}

std::string cmd_diffusion_law(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const DriftMatrix a = config_drift(c, "diffusion-law");
  if (c.has("diffusion-law", "t")) {
    const GaussianLaw law =
        exact_transition(a, c.get_vector("diffusion-law", "u0"), c.get_double("diffusion-law", "t"));
    write_file(o.out_dir, "law.csv", gaussian_law_csv(law));
    return "kind=transition trace=" + format_double(law.covariance.trace());
  }
  const GaussianLaw law = stationary_gaussian(a);
  write_file(o.out_dir, "law.csv", gaussian_law_csv(law));
  return "kind=stationary trace=" + format_double(law.covariance.trace()) +
         " lyapunov_residual=" + format_double(lyapunov_residual(a, law.covariance));
}

std::string cmd_diffusion_path(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const std::string s = "diffusion-path";
  const DriftMatrix a = config_drift(c, s);
  const std::string noise = c.find(s, "noise").value_or("true");
  if (noise != "true" && noise != "false") throw ConfigError("field 'noise': expected true or false");
  const DiffusionPath path =
      euler_maruyama(a, c.get_vector(s, "u0"), c.get_double(s, "dt", 1e-3), c.get_double(s, "t_end"),
                     c.get_uint(s, "seed", 1), noise == "true",
                     static_cast<int>(c.get_int(s, "record_stride", 1)));
  write_file(o.out_dir, "path.csv", path_csv(path));
  return "points=" + std::to_string(path.times.size());
}

std::string cmd_fluid_path(const CommonOptions& o) {
  const Config c = load_config(o, true);
  const std::string s = "fluid-path";
  const Graph g = config_graph(c, s);
  const FluidPath path = rk4_integrate(
      validate_interaction(g, c.get_matrix(s, "birth")).matrix(),
      validate_interaction(g, c.get_matrix(s, "death")).matrix(), c.get_vector(s, "u0"),
      c.get_double(s, "dt", 1e-3), c.get_double(s, "t_end"),
      static_cast<int>(c.get_int(s, "record_stride", 1)));
  write_file(o.out_dir, "path.csv", path_csv(path));
  return "points=" + std::to_string(path.times.size());
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interacting truncated birth-and-death chains and their scaling limits", "ibd"};
  app.require_subcommand(1);

  CommonOptions opts;
  struct Command {
    const char* name;
    const char* help;
    Handler handler;
    bool spectral;
  };
  const std::vector<Command> commands = {
      {"simulate", "Simulate one chain trajectory", cmd_simulate, false},
      {"stationary", "Stationary law by solving piQ = 0", cmd_stationary, false},
      {"gibbs", "Product-form stationary law (symmetric A)", cmd_gibbs, false},
      {"balance-check", "Max detailed-balance residual", cmd_balance, false},
      {"spectrum", "Spectrum of -(aE + bI) for a star, path or graph", cmd_spectrum, true},
      {"classify", "Positive-definiteness verdict for -(aE + bI)", cmd_classify, true},
      {"exp-diffusion", "Diffusion-scaling convergence experiment", cmd_exp_diffusion, false},
      {"exp-fluid", "Fluid-scaling convergence experiment", cmd_exp_fluid, false},
      {"gen-check", "Rescaled generator convergence check", cmd_gen_check, false},
      {"diffusion-law", "Exact transition or stationary Gaussian law", cmd_diffusion_law, false},
      {"diffusion-path", "Euler-Maruyama path of du = Au dt + sqrt(2) dW", cmd_diffusion_path, false},
      {"fluid-path", "RK4 path of the fluid ODE", cmd_fluid_path, false},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config,--spec", opts.config, "Config file (schema=1)");
    sub->add_option("-o,--out", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed, "Override the config seed");
    if (cmd.spectral) {
      sub->add_option("--alpha", opts.alpha, "Diagonal coefficient");
      sub->add_option("--beta", opts.beta, "Coupling coefficient");
      sub->add_option("--graph", opts.graph, "Graph file ('n N' / 'e u v' lines)");
      sub->add_option("--family", opts.family, "star | path | graph (spectrum only)");
      sub->add_option("--size", opts.size, "Leaves m (star) or n for n+2 vertices (path)");
    }
  }

  std::vector<const char*> argv{"ibd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  for (const auto& cmd : commands) {
    if (!app.got_subcommand(cmd.name)) continue;
    try {
      const std::string summary = cmd.handler(opts);
      out << cmd.name << " ok " << summary << "\n";
      return 0;
    } catch (const ValidationError& e) {
      err << cmd.name << " error: " << e.what() << "\n";
      return 1;
    } catch (const NumericError& e) {
      err << cmd.name << " numeric failure: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << cmd.name << " failure: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}

}  // namespace ibd
