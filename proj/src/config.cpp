#include "ibd/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ibd/error.hpp"

namespace ibd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& s) {
  const auto hash = s.find('#');
  return hash == std::string::npos ? s : s.substr(0, hash);
}

std::vector<std::string> tokens(const std::string& s) {
  std::string spaced = s;
  for (char& ch : spaced)
    if (ch == ',') ch = ' ';
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& text, const std::string& field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("field '" + field + "': '" + text + "' is not a number");
  }
  return v;
}

std::int64_t to_int(const std::string& text, const std::string& field) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("field '" + field + "': '" + text + "' is not an integer");
  }
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, std::filesystem::path base_dir) {
  Config c;
  c.base_dir_ = std::move(base_dir);
  std::istringstream in(text);
  std::string line;
  std::string section;
  bool schema_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (!schema_seen) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || trim(line.substr(0, eq)) != "schema") {
        throw ConfigError(where + ": expected 'schema=1' header");
      }
      if (trim(line.substr(eq + 1)) != "1") {
        throw ConfigError(where + ": unsupported schema '" + trim(line.substr(eq + 1)) + "'");
      }
      schema_seen = true;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    c.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  if (!schema_seen) throw ConfigError("config has no 'schema=1' header");
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

std::optional<std::string> Config::find(const std::string& section, const std::string& key) const {
  if (!section.empty()) {
    if (auto it = values_.find(section + "." + key); it != values_.end()) return it->second;
  }
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return std::nullopt;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key).has_value();
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) throw ConfigError("missing field '" + key + "'");
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  return to_double(get_string(section, key), key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  auto v = find(section, key);
  return v ? to_double(*v, key) : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
  return to_int(get_string(section, key), key);
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
  auto v = find(section, key);
  return v ? to_int(*v, key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError("field '" + key + "': '" + *v + "' is not an unsigned integer");
  }
  return out;
}

Vector Config::get_vector(const std::string& section, const std::string& key) const {
  const auto parts = tokens(get_string(section, key));
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(i) = to_double(parts[i], key);
  return v;
}

Matrix Config::get_matrix(const std::string& section, const std::string& key) const {
  std::vector<std::vector<double>> rows;
  std::istringstream in(get_string(section, key));
  for (std::string row; std::getline(in, row, ';');) {
    auto parts = tokens(row);
    if (parts.empty()) continue;
    std::vector<double> values;
    for (const auto& p : parts) values.push_back(to_double(p, key));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ConfigError("field '" + key + "' is an empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ConfigError("field '" + key + "': row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()) + " entries, expected " +
                        std::to_string(rows.front().size()));
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string suffix = "." + key;
  std::erase_if(values_, [&](const auto& kv) {
    return kv.first.size() > suffix.size() && kv.first.ends_with(suffix);
  });
  values_[key] = value;
}

std::filesystem::path Config::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir_ / p;
}

Graph config_graph(const Config& c, const std::string& section) {
  if (auto file = c.find(section, "graph")) return read_graph_file(c.resolve(*file).string());
  if (!c.has(section, "vertices")) throw ConfigError("missing field 'graph' (or 'vertices')");
  const auto n = c.get_int(section, "vertices");
  std::vector<Edge> edges;
  if (auto text = c.find(section, "edges")) {
    for (const auto& t : tokens(*text)) {
      const auto dash = t.find('-');
      if (dash == std::string::npos) throw ConfigError("field 'edges': '" + t + "' is not 'u-v'");
      edges.emplace_back(static_cast<int>(to_int(t.substr(0, dash), "edges")),
                         static_cast<int>(to_int(t.substr(dash + 1), "edges")));
    }
  }
  return build_graph(static_cast<int>(n), edges);
}

ChainSpec config_chain(const Config& c, const std::string& section) {
  const Graph g = config_graph(c, section);
  return make_chain_spec(g, c.get_matrix(section, "birth"), c.get_matrix(section, "death"),
                         c.get_int(section, "l"), c.get_int(section, "r"));
}

namespace {

ScalingSchedule config_schedule(const Config& c, const std::string& section, Regime regime) {
  const Vector u = c.get_vector(section, "u");
  if (c.has(section, "epsilons")) {
    ScalingSchedule s;
    s.regime = regime;
    s.initial_point = u;
    const Vector eps = c.get_vector(section, "epsilons");
    const Vector boxes = c.get_vector(section, "boxes");
    s.epsilons.assign(eps.data(), eps.data() + eps.size());
    for (double b : boxes) s.box_sizes.push_back(static_cast<Spin>(b));
    s.validate();
    return s;
  }
  return geometric_schedule(regime, static_cast<int>(c.get_int(section, "eps_first_exponent", 2)),
                            static_cast<int>(c.get_int(section, "eps_last_exponent", 5)), u);
}

}  // namespace

ExperimentConfig config_experiment(const Config& c, const std::string& section, Regime regime) {
  ExperimentConfig e;
  e.graph = config_graph(c, section);
  e.birth = c.get_matrix(section, "birth");
  e.death = c.get_matrix(section, "death");
  e.schedule = config_schedule(c, section, regime);
  e.t = c.get_double(section, "t", e.t);
  e.replicas = static_cast<int>(c.get_int(section, "replicas", e.replicas));
  e.seed = c.get_uint(section, "seed", e.seed);
  e.max_events = c.get_uint(section, "max_events", e.max_events);
  e.grid_points = static_cast<int>(c.get_int(section, "grid_points", e.grid_points));
  e.rk4_dt = c.get_double(section, "rk4_dt", e.rk4_dt);
  e.threads = static_cast<int>(c.get_int(section, "threads", e.threads));
  return e;
}

GeneratorCheckConfig config_generator_check(const Config& c, const std::string& section) {
  GeneratorCheckConfig g;
  g.graph = config_graph(c, section);
  g.birth = c.get_matrix(section, "birth");
  g.death = c.get_matrix(section, "death");
  g.schedule = config_schedule(c, section, Regime::diffusion);
  g.bump.center = c.has(section, "center") ? c.get_vector(section, "center")
                                           : Vector::Zero(g.graph.num_vertices());
  g.bump.radius = c.get_double(section, "radius", g.bump.radius);
  g.bump.amplitude = c.get_double(section, "amplitude", g.bump.amplitude);
  g.grid_points = static_cast<int>(c.get_int(section, "grid_points", g.grid_points));
  return g;
}

}  // namespace ibd
