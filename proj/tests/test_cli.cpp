#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ibd/cli.hpp"
#include "ibd/config.hpp"
#include "ibd/error.hpp"

using namespace ibd;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(IBD_SOURCE_DIR) / "configs";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ibd_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("Config parsing") {
  const Config c = Config::parse(
      "# leading comment\n"
      "schema = 1\n"
      "alpha = -3   # trailing comment\n"
      "u = 1, 2 3\n"
      "birth = 0 1; 1 0\n"
      "[exp]\n"
      "alpha = 2.5\n"
      "seed = 42\n");
  CHECK(c.get_double("", "alpha") == -3.0);
  CHECK(c.get_double("exp", "alpha") == 2.5);
  CHECK(c.get_double("other", "alpha") == -3.0);
  CHECK(c.get_uint("exp", "seed", 1) == 42);
  CHECK(c.get_uint("", "seed", 1) == 1);
  CHECK(c.get_int("exp", "missing", 7) == 7);
  CHECK(c.get_vector("", "u").size() == 3);
  const Matrix m = c.get_matrix("", "birth");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == 1.0);
  CHECK_FALSE(c.has("", "seed"));
  CHECK(c.has("exp", "seed"));

  Config o = c;
  o.set("seed", "9");
  CHECK(o.get_uint("exp", "seed", 1) == 9);

  CHECK_THROWS_AS(c.get_string("", "nope"), ConfigError);
  CHECK_THROWS_AS(c.get_int("exp", "alpha"), ConfigError);
  CHECK_THROWS_AS(Config::parse("alpha = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("schema=2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse(""), ConfigError);
  CHECK_THROWS_AS(Config::parse("schema=1\nnot a pair\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("schema=1\n[open\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("schema=1\nm = 1 2; 3\n").get_matrix("", "m"), ConfigError);
  CHECK_THROWS_AS(Config::parse("schema=1\nx = 1e\n").get_double("", "x"), ConfigError);
  CHECK_THROWS_AS(Config::load("/definitely/not/here.cfg"), ConfigError);

  try {
    Config::parse("schema=1\nx = abc\n").get_double("", "x");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
}

TEST_CASE("config_graph and config_chain") {
  const Config inline_graph = Config::parse("schema=1\nvertices=3\nedges = 0-1 1-2\n");
  const Graph g = config_graph(inline_graph, "");
  CHECK(g.num_vertices() == 3);
  CHECK(g.edges().size() == 2);
  CHECK_THROWS_AS(config_graph(Config::parse("schema=1\nvertices=3\nedges=0-1\n"), ""),
                  DisconnectedGraph);
  CHECK_THROWS_AS(config_graph(Config::parse("schema=1\nvertices=2\nedges=0:1\n"), ""),
                  ConfigError);
  CHECK_THROWS_AS(config_graph(Config::parse("schema=1\n"), ""), ConfigError);

  const Config file_graph = Config::load(kConfigs / "two_site.cfg");
  const ChainSpec spec = config_chain(file_graph, "simulate");
  CHECK(spec.num_vertices() == 2);
  CHECK(spec.lower() == 0);
  CHECK(spec.upper() == 1);
}

TEST_CASE("classify prints the star verdict") {
  const fs::path out = scratch_dir("classify");
  const auto r = run({"classify", "--graph", (kConfigs / "star5.g").string(), "--alpha", "-3",
                      "--beta", "1", "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("classify ok pd=true min_eig=1.0 method=closed_form_star", 0) == 0);
  CHECK(slurp(out / "classify.csv") ==
        "method,pd,min_eig,max_eig\nclosed_form_star,true,1.0,5.0\n");
  CHECK(csv_rows(slurp(out / "eigenvalues.csv")).size() == 6);

  const auto boundary = run({"classify", "--graph", (kConfigs / "star5.g").string(), "--alpha",
                             "-2", "--beta", "1", "-o", out.string()});
  CHECK(boundary.code == 0);
  CHECK(boundary.out.find("pd=false") != std::string::npos);
}

TEST_CASE("spectrum subcommand") {
  const fs::path out = scratch_dir("spectrum");
  auto r = run({"spectrum", "--family", "star", "--size", "4", "--alpha", "-3", "--beta", "1",
                "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "spectrum ok pd=true min_eig=1.0 method=closed_form_star\n");
  r = run({"spectrum", "--family", "path", "--size", "0", "--alpha", "-2", "--beta", "1", "-o",
           out.string()});
  CHECK(r.code == 0);
  CHECK(csv_rows(slurp(out / "eigenvalues.csv")).size() == 3);
  r = run({"spectrum", "--family", "ring", "--size", "3", "--alpha", "-2", "--beta", "1", "-o",
           out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("'family'") != std::string::npos);
  r = run({"spectrum", "--family", "star", "--alpha", "-2", "--beta", "1", "-o", out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("'size'") != std::string::npos);
}

TEST_CASE("gibbs writes a normalised distribution") {
  const fs::path out = scratch_dir("gibbs");
  const auto r = run({"gibbs", "--spec", (kConfigs / "two_site.cfg").string(), "-o", out.string()});
  CHECK(r.code == 0);
  const auto rows = csv_rows(slurp(out / "gibbs.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"state_index", "s0", "s1", "probability"});
  double total = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i].back());
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  const auto s = run({"stationary", "-c", (kConfigs / "two_site.cfg").string(), "-o", out.string()});
  CHECK(s.code == 0);
  const auto srows = csv_rows(slurp(out / "stationary.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(srows[i].back()) == doctest::Approx(std::stod(rows[i].back())).epsilon(1e-10));
  }

  const auto b = run({"balance-check", "-c", (kConfigs / "two_site.cfg").string(), "-o",
                      out.string()});
  CHECK(b.code == 0);
  CHECK(slurp(out / "balance.csv").rfind("max_residual\n", 0) == 0);
}

TEST_CASE("simulate is reproducible and honours --seed") {
  const fs::path a = scratch_dir("sim_a"), b = scratch_dir("sim_b");
  const std::string cfg = (kConfigs / "three_path.cfg").string();
  CHECK(run({"simulate", "-c", cfg, "-o", a.string()}).code == 0);
  CHECK(run({"simulate", "-c", cfg, "-o", b.string()}).code == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "trajectory.csv").rfind("t,vertex,sign\n", 0) == 0);
  CHECK(run({"simulate", "-c", cfg, "--seed", "99", "-o", b.string()}).code == 0);
  CHECK(slurp(a / "trajectory.csv") != slurp(b / "trajectory.csv"));
}

TEST_CASE("limit-process subcommands") {
  const fs::path out = scratch_dir("limits");
  const std::string cfg = (kConfigs / "three_path.cfg").string();
  auto r = run({"diffusion-law", "-c", cfg, "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("kind=stationary") != std::string::npos);
  CHECK(csv_rows(slurp(out / "law.csv")).size() == 1 + 3 + 9);

  r = run({"diffusion-path", "-c", cfg, "-o", out.string()});
  CHECK(r.code == 0);
  auto rows = csv_rows(slurp(out / "path.csv"));
  CHECK(rows[0] == std::vector<std::string>{"t", "v0", "v1", "v2"});
  CHECK(rows.size() == 52);

  r = run({"fluid-path", "-c", cfg, "-o", out.string()});
  CHECK(r.code == 0);
  rows = csv_rows(slurp(out / "path.csv"));
  CHECK(rows.back()[0] == "5.0");

  const fs::path bad = out / "transient.cfg";
  write(bad, "schema=1\nvertices=1\nbirth=1\ndeath=0\n");
  r = run({"diffusion-law", "-c", bad.string(), "-o", out.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("NotHurwitz") != std::string::npos);
}

TEST_CASE("experiment subcommands") {
  const fs::path dir = scratch_dir("exp");
  const fs::path cfg = dir / "exp.cfg";
  write(cfg,
        "schema=1\nvertices=1\nbirth=0\ndeath=1\n"
        "[exp-diffusion]\nu=1\neps_first_exponent=2\neps_last_exponent=3\nreplicas=50\n"
        "[exp-fluid]\nu=1\nt=2\neps_first_exponent=3\neps_last_exponent=5\nreplicas=2\n"
        "[gen-check]\nu=0\nradius=2\neps_first_exponent=3\neps_last_exponent=4\n");
  auto r = run({"exp-diffusion", "-c", cfg.string(), "-o", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("exp-diffusion ok levels=2 ", 0) == 0);
  CHECK(csv_rows(slurp(dir / "table.csv")).size() == 1 + 2 * 2);
  CHECK(csv_rows(slurp(dir / "levels.csv")).size() == 3);

  r = run({"exp-fluid", "-c", cfg.string(), "-o", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("boundary_hits=0") != std::string::npos);
  CHECK(csv_rows(slurp(dir / "table.csv")).size() == 1 + 3 * 2);

  r = run({"gen-check", "-c", cfg.string(), "-o", dir.string()});
  CHECK(r.code == 0);
  CHECK(csv_rows(slurp(dir / "table.csv")).size() == 1 + 2 * 2);

  const fs::path tight = dir / "tight.cfg";
  write(tight, "schema=1\nvertices=1\nbirth=0\ndeath=1\nu=1\nmax_events=10\n");
  r = run({"exp-diffusion", "-c", tight.string(), "-o", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("BudgetExceeded") != std::string::npos);
}

TEST_CASE("usage and validation errors") {
  const fs::path out = scratch_dir("errors");
  auto r = run({"gibbs", "--spec", "/no/such/file.cfg", "-o", out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("cannot open") != std::string::npos);
  CHECK(run({"gibbs", "-o", out.string()}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"classify", "--alpha", "x"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  const fs::path cfg = out / "asym.cfg";
  write(cfg, "schema=1\nvertices=2\nedges=0-1\nbirth=0 1; 0 0\ndeath=0 0; 0 0\nl=0\nr=1\n");
  r = run({"gibbs", "-c", cfg.string(), "-o", out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("AsymmetricA") != std::string::npos);
  CHECK(r.out.empty());

  write(cfg, "schema=1\nvertices=2\nedges=0-1\nbirth=0 0 1; 0 0 0\ndeath=0 0; 0 0\nl=0\nr=1\n");
  CHECK(run({"stationary", "-c", cfg.string(), "-o", out.string()}).code == 1);

  write(cfg, "schema=1\nvertices=1\nbirth=800\ndeath=0\nl=0\nr=3\nt_end=1\ninitial=1\n");
  r = run({"simulate", "-c", cfg.string(), "-o", out.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("RateOverflow") != std::string::npos);
}
