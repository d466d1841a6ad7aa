#include "ibd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "ibd/diffusion.hpp"
#include "ibd/error.hpp"
#include "ibd/fluid.hpp"
#include "ibd/format.hpp"
#include "ibd/rng.hpp"
#include "ibd/simulate.hpp"

namespace ibd {

std::string to_string(Regime r) { return r == Regime::diffusion ? "diffusion" : "fluid"; }

void ScalingSchedule::validate() const {
  if (epsilons.empty()) throw InvalidSchedule("schedule has no levels");
  if (box_sizes.size() != epsilons.size()) {
    throw InvalidSchedule("epsilons and box_sizes have different lengths");
  }
  if (initial_point.size() == 0) throw InvalidSchedule("initial point is empty");
  for (int n = 0; n < levels(); ++n) {
    if (!(epsilons[n] > 0.0)) throw InvalidSchedule("epsilon must be positive at level " + std::to_string(n));
    if (box_sizes[n] < 1) throw InvalidSchedule("box size must be >= 1 at level " + std::to_string(n));
    if (n == 0) continue;
    if (!(epsilons[n] < epsilons[n - 1])) {
      throw InvalidSchedule("epsilon not strictly decreasing at level " + std::to_string(n));
    }
    if (!(box_sizes[n] * epsilons[n] > box_sizes[n - 1] * epsilons[n - 1])) {
      throw InvalidSchedule("l*epsilon not strictly increasing at level " + std::to_string(n));
    }
  }
}

ScalingSchedule geometric_schedule(Regime regime, int first_exponent, int last_exponent,
                                   Vector initial_point) {
  if (first_exponent > last_exponent || first_exponent < 0 || last_exponent > 30) {
    throw InvalidSchedule("exponent range must satisfy 0 <= first <= last <= 30");
  }
  ScalingSchedule s;
  s.regime = regime;
  s.initial_point = std::move(initial_point);
  for (int k = first_exponent; k <= last_exponent; ++k) {
    const double eps = std::ldexp(1.0, -k);
    s.epsilons.push_back(eps);
    s.box_sizes.push_back(static_cast<Spin>(std::ceil(1.0 / (eps * eps))));
  }
  s.validate();
  return s;
}

namespace {

void check_level(const ScalingSchedule& schedule, int n) {
  if (n < 0 || n >= schedule.levels()) {
    throw IndexOutOfRange("level " + std::to_string(n) + " outside schedule of " +
                          std::to_string(schedule.levels()) + " levels");
  }
}

}  // namespace

ChainSpec rescaled_chain_spec(const Graph& g, const Matrix& birth, const Matrix& death,
                              const ScalingSchedule& schedule, int n) {
  check_level(schedule, n);
  const double eps = schedule.epsilons[n];
  const double factor = schedule.regime == Regime::diffusion ? eps * eps : eps;
  const Spin box = schedule.box_sizes[n];
  return make_chain_spec(g, factor * birth, factor * death, box, box);
}

Configuration rescaled_initial_configuration(const ScalingSchedule& schedule, int n) {
  check_level(schedule, n);
  const double eps = schedule.epsilons[n];
  const Spin box = schedule.box_sizes[n];
  Configuration xi(schedule.initial_point.size());
  for (std::size_t x = 0; x < xi.size(); ++x) {
    xi[x] = std::clamp<Spin>(std::llround(schedule.initial_point(x) / eps), -box, box);
  }
  return xi;
}

std::vector<ConvergenceRow> ConvergenceTable::rows_for(const std::string& statistic) const {
  std::vector<ConvergenceRow> out;
  for (const auto& r : rows)
    if (r.statistic == statistic) out.push_back(r);
  return out;
}

double ConvergenceTable::level_error(int level) const {
  double worst = 0.0;
  for (const auto& r : rows)
    if (r.level == level) worst = std::max(worst, r.abs_error);
  return worst;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "level,epsilon,statistic,empirical,limit,abs_error,mc_std_error\n";
  for (const auto& r : table.rows) {
    out << r.level << "," << format_double(r.epsilon) << "," << r.statistic << ","
        << format_double(r.empirical) << "," << format_double(r.limit) << ","
        << format_double(r.abs_error) << "," << format_double(r.mc_std_error) << "\n";
  }
  return out.str();
}

std::string levels_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "level,epsilon,box,events,boundary_hits\n";
  for (const auto& l : table.levels) {
    out << l.level << "," << format_double(l.epsilon) << "," << l.box << "," << l.events << ","
        << l.boundary_hits << "\n";
  }
  return out.str();
}

namespace {

// Runs body(i) for i in [0, count). Results must be written to per-index
// slots; the first exception (lowest index wins ties by scheduling) is
// rethrown after all workers stop.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double total_rate(const ChainSpec& spec, const Configuration& xi) {
  double total = 0.0;
  for (int x = 0; x < spec.num_vertices(); ++x) total += birth_rate(spec, xi, x) + death_rate(spec, xi, x);
  return total;
}

void check_experiment(const ExperimentConfig& config, Regime regime) {
  config.schedule.validate();
  if (config.schedule.regime != regime) {
    throw InvalidSchedule("schedule regime is " + to_string(config.schedule.regime) +
                          ", expected " + to_string(regime));
  }
  if (config.schedule.initial_point.size() != config.graph.num_vertices()) {
    throw DimensionMismatch("initial point length does not match the graph");
  }
  if (!(config.t > 0.0)) throw ValidationError("experiment horizon t must be positive");
  const int min_replicas = regime == Regime::diffusion ? 2 : 1;
  if (config.replicas < min_replicas) {
    throw ValidationError("experiment needs at least " + std::to_string(min_replicas) + " replicas");
  }
}

// Guards the cumulative event budget before a level starts.
void check_projection(const ExperimentConfig& config, const ChainSpec& spec,
                      const Configuration& x0, double horizon, std::uint64_t used) {
  const double projected =
      static_cast<double>(config.replicas) * horizon * total_rate(spec, x0) + static_cast<double>(used);
  if (projected > static_cast<double>(config.max_events)) {
    throw BudgetExceeded("projected " + std::to_string(projected) + " events exceed the cap of " +
                         std::to_string(config.max_events));
  }
}

}  // namespace

ConvergenceTable run_diffusion_experiment(const ExperimentConfig& config) {
  check_experiment(config, Regime::diffusion);
  const auto& schedule = config.schedule;
  const int d = config.graph.num_vertices();
  const int reps = config.replicas;
  const GaussianLaw limit = exact_transition(
      DriftMatrix(validate_interaction(config.graph, config.birth),
                  validate_interaction(config.graph, config.death)),
      schedule.initial_point, config.t);

  ConvergenceTable table;
  std::uint64_t used = 0;
  for (int n = 0; n < schedule.levels(); ++n) {
    const double eps = schedule.epsilons[n];
    const ChainSpec spec = rescaled_chain_spec(config.graph, config.birth, config.death, schedule, n);
    const Configuration x0 = rescaled_initial_configuration(schedule, n);
    const double horizon = config.t / (eps * eps);
    check_projection(config, spec, x0, horizon, used);

    Matrix samples(reps, d);
    std::vector<std::uint64_t> events(reps), hits(reps);
    parallel_for(reps, config.threads, [&](int i) {
      ChainSimulator sim(spec, x0, mix_seed(config.seed, {static_cast<std::uint64_t>(n),
                                                          static_cast<std::uint64_t>(i)}));
      sim.set_event_budget(config.max_events);
      sim.run_until(horizon);
      for (int x = 0; x < d; ++x) samples(i, x) = eps * static_cast<double>(sim.state()[x]);
      events[i] = sim.event_count();
      hits[i] = sim.boundary_hits();
    });
    LevelInfo info{n, eps, schedule.box_sizes[n], 0, 0};
    for (int i = 0; i < reps; ++i) {
      info.events += events[i];
      info.boundary_hits += hits[i];
    }
    used += info.events;
    if (used > config.max_events) {
      throw BudgetExceeded(std::to_string(used) + " events exceed the cap of " +
                           std::to_string(config.max_events));
    }
    table.levels.push_back(info);

    const Vector mean = samples.colwise().mean().transpose();
    const Matrix centered = samples.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(reps - 1);
    for (int x = 0; x < d; ++x) {
      const double se = std::sqrt(cov(x, x) / reps);
      table.rows.push_back({n, eps, "mean[" + std::to_string(x) + "]", mean(x), limit.mean(x),
                            std::abs(mean(x) - limit.mean(x)), se});
    }
    for (int x = 0; x < d; ++x) {
      for (int y = x; y < d; ++y) {
        const Vector products = centered.col(x).cwiseProduct(centered.col(y));
        const double pm = products.mean();
        const double pvar = (products.array() - pm).square().sum() / (reps - 1);
        table.rows.push_back({n, eps, "cov[" + std::to_string(x) + "," + std::to_string(y) + "]",
                              cov(x, y), limit.covariance(x, y),
                              std::abs(cov(x, y) - limit.covariance(x, y)),
                              std::sqrt(pvar / reps)});
      }
    }
  }
  return table;
}

ConvergenceTable run_fluid_experiment(const ExperimentConfig& config) {
  check_experiment(config, Regime::fluid);
  const auto& schedule = config.schedule;
  const int d = config.graph.num_vertices();
  const int reps = config.replicas;
  const int grid = config.grid_points;
  if (grid < 1) throw ValidationError("grid_points must be >= 1");
  validate_interaction(config.graph, config.birth);
  validate_interaction(config.graph, config.death);

  const double spacing = config.t / grid;
  const int substeps = std::max(1, static_cast<int>(std::ceil(spacing / config.rk4_dt - 1e-9)));
  const FluidPath gamma = rk4_integrate(config.birth, config.death, schedule.initial_point,
                                        spacing / substeps, config.t, substeps);
  std::vector<double> grid_times(grid + 1);
  for (int k = 0; k <= grid; ++k) grid_times[k] = (k == grid) ? config.t : k * spacing;

  ConvergenceTable table;
  std::uint64_t used = 0;
  for (int n = 0; n < schedule.levels(); ++n) {
    const double eps = schedule.epsilons[n];
    const ChainSpec spec = rescaled_chain_spec(config.graph, config.birth, config.death, schedule, n);
    const Configuration x0 = rescaled_initial_configuration(schedule, n);
    check_projection(config, spec, x0, config.t / eps, used);

    std::vector<double> sup(reps);
    std::vector<std::uint64_t> events(reps), hits(reps);
    parallel_for(reps, config.threads, [&](int i) {
      ChainSimulator sim(spec, x0, mix_seed(config.seed, {static_cast<std::uint64_t>(n),
                                                          static_cast<std::uint64_t>(i)}));
      sim.set_event_budget(config.max_events);
      double worst = 0.0;
      for (int k = 0; k <= grid; ++k) {
        sim.run_until(grid_times[k] / eps);
        for (int x = 0; x < d; ++x) {
          const double scaled = eps * static_cast<double>(sim.state()[x]);
          worst = std::max(worst, std::abs(scaled - gamma.states[k](x)));
        }
      }
      sup[i] = worst;
      events[i] = sim.event_count();
      hits[i] = sim.boundary_hits();
    });
    LevelInfo info{n, eps, schedule.box_sizes[n], 0, 0};
    double sum = 0.0, worst = 0.0;
    for (int i = 0; i < reps; ++i) {
      info.events += events[i];
      info.boundary_hits += hits[i];
      sum += sup[i];
      worst = std::max(worst, sup[i]);
    }
    used += info.events;
    if (used > config.max_events) {
      throw BudgetExceeded(std::to_string(used) + " events exceed the cap of " +
                           std::to_string(config.max_events));
    }
    table.levels.push_back(info);

    const double mean = sum / reps;
    double var = 0.0;
    for (double s : sup) var += (s - mean) * (s - mean);
    var = reps > 1 ? var / (reps - 1) : 0.0;
    table.rows.push_back({n, eps, "sup_distance", mean, 0.0, mean, std::sqrt(var / reps)});
    table.rows.push_back({n, eps, "sup_distance_max", worst, 0.0, worst, 0.0});
  }
  return table;
}

double BumpFunction::value(const Vector& u) const {
  const double s = (u - center).squaredNorm() / (radius * radius);
  if (s >= 1.0) return 0.0;
  return amplitude * std::exp(-1.0 / (1.0 - s));
}

Vector BumpFunction::gradient(const Vector& u) const {
  const double s = (u - center).squaredNorm() / (radius * radius);
  if (s >= 1.0) return Vector::Zero(u.size());
  const double g = 1.0 / (1.0 - s);
  const double f = amplitude * std::exp(-g);
  // df/ds = -f g², ds/du_x = 2(u_x - c_x)/ρ².
  return (-f * g * g * 2.0 / (radius * radius)) * (u - center);
}

Vector BumpFunction::hessian_diagonal(const Vector& u) const {
  const double s = (u - center).squaredNorm() / (radius * radius);
  if (s >= 1.0) return Vector::Zero(u.size());
  const double g = 1.0 / (1.0 - s);
  const double f = amplitude * std::exp(-g);
  const double df = -f * g * g;
  const double d2f = f * (g * g * g * g - 2.0 * g * g * g);
  const double r2 = radius * radius;
  Vector out(u.size());
  for (Eigen::Index x = 0; x < u.size(); ++x) {
    const double ds = 2.0 * (u(x) - center(x)) / r2;
    out(x) = d2f * ds * ds + df * 2.0 / r2;
  }
  return out;
}

double limit_generator(const Matrix& a, const BumpFunction& f, const Vector& u) {
  return f.hessian_diagonal(u).sum() + (a * u).dot(f.gradient(u));
}

double rescaled_generator(const ChainSpec& spec, double epsilon, const BumpFunction& f,
                          const Configuration& xi) {
  const int d = spec.num_vertices();
  Vector point(d);
  for (int x = 0; x < d; ++x) point(x) = epsilon * static_cast<double>(xi[x]);
  const double here = f.value(point);
  double total = 0.0;
  for (int x = 0; x < d; ++x) {
    const double up = birth_rate(spec, xi, x);
    const double down = death_rate(spec, xi, x);
    Vector moved = point;
    moved(x) = epsilon * static_cast<double>(xi[x] + 1);
    if (up > 0.0) total += (f.value(moved) - here) * up;
    moved(x) = epsilon * static_cast<double>(xi[x] - 1);
    if (down > 0.0) total += (f.value(moved) - here) * down;
  }
  return total / (epsilon * epsilon);
}

ConvergenceTable generator_convergence_check(const GeneratorCheckConfig& config) {
  const auto& schedule = config.schedule;
  schedule.validate();
  if (schedule.regime != Regime::diffusion) {
    throw InvalidSchedule("generator check uses the diffusion scaling");
  }
  const int d = config.graph.num_vertices();
  const BumpFunction& f = config.bump;
  if (f.center.size() != d) throw DimensionMismatch("bump center length does not match the graph");
  if (!(f.radius > 0.0)) throw ValidationError("bump radius must be positive");
  if (config.grid_points < 2) throw ValidationError("grid_points must be >= 2");
  const Matrix a = validate_interaction(config.graph, config.birth).matrix() -
                   validate_interaction(config.graph, config.death).matrix();

  std::vector<Vector> points;
  const int g = config.grid_points;
  std::vector<int> idx(d, 0);
  while (true) {
    Vector u(d);
    for (int x = 0; x < d; ++x) {
      u(x) = f.center(x) - f.radius + 2.0 * f.radius * idx[x] / (g - 1);
    }
    if ((u - f.center).norm() < f.radius) points.push_back(u);
    int x = 0;
    while (x < d && ++idx[x] == g) idx[x++] = 0;
    if (x == d) break;
  }

  ConvergenceTable table;
  for (int n = 0; n < schedule.levels(); ++n) {
    const double eps = schedule.epsilons[n];
    const Spin box = schedule.box_sizes[n];
    const double reach = eps * static_cast<double>(box);
    for (int x = 0; x < d; ++x) {
      if (f.center(x) - f.radius < -reach || f.center(x) + f.radius > reach) {
        throw SupportNotCovered("bump support leaves [" + std::to_string(-reach) + ", " +
                                std::to_string(reach) + "] at level " + std::to_string(n));
      }
    }
    const ChainSpec spec = rescaled_chain_spec(config.graph, config.birth, config.death, schedule, n);
    double worst = 0.0;
    Configuration xi(d);
    Vector lattice_point(d);
    for (const Vector& u : points) {
      for (int x = 0; x < d; ++x) {
        xi[x] = std::clamp<Spin>(std::llround(u(x) / eps), -box, box);
        lattice_point(x) = eps * static_cast<double>(xi[x]);
      }
      worst = std::max(worst, std::abs(rescaled_generator(spec, eps, f, xi) -
                                       limit_generator(a, f, lattice_point)));
    }
    table.levels.push_back({n, eps, box, 0, 0});
    table.rows.push_back({n, eps, "generator_error", worst, 0.0, worst, 0.0});
    table.rows.push_back({n, eps, "error_over_epsilon", worst / eps, 0.0, worst / eps, 0.0});
  }
  return table;
}

}  // namespace ibd
