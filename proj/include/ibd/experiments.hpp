#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibd/chain.hpp"
#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"

namespace ibd {

/// Diffusion: rates from ε²A_b, ε²A_d, time sped up by ε^{-2}.
/// Fluid: rates from εA_b, εA_d, time sped up by ε^{-1}.
enum class Regime { diffusion, fluid };

std::string to_string(Regime r);

/// Levels n = 0..N-1 of (ε_n, l_n = r_n) plus the limit's initial point u.
struct ScalingSchedule {
  std::vector<double> epsilons;
  std::vector<Spin> box_sizes;
  Vector initial_point;
  Regime regime = Regime::diffusion;

  int levels() const { return static_cast<int>(epsilons.size()); }
  /// Throws InvalidSchedule unless ε_n strictly decreases (and stays
  /// positive) while l_n·ε_n strictly increases.
  void validate() const;
};

/// ε = 2^{-k} for k = first_exponent..last_exponent, l = r = ⌈ε^{-2}⌉.
ScalingSchedule geometric_schedule(Regime regime, int first_exponent, int last_exponent,
                                   Vector initial_point);

/// Scaled chain for level n: matrices multiplied by ε_n² (diffusion) or ε_n
/// (fluid), box {-l_n,…,l_n}^Λ.
ChainSpec rescaled_chain_spec(const Graph& g, const Matrix& birth, const Matrix& death,
                              const ScalingSchedule& schedule, int n);

/// Componentwise nearest integer to u/ε_n, clamped to the level-n box.
Configuration rescaled_initial_configuration(const ScalingSchedule& schedule, int n);

struct ConvergenceRow {
  int level = 0;
  double epsilon = 0.0;
  std::string statistic;
  double empirical = 0.0;
  double limit = 0.0;
  double abs_error = 0.0;
  double mc_std_error = 0.0;
};

struct LevelInfo {
  int level = 0;
  double epsilon = 0.0;
  Spin box = 0;
  std::uint64_t events = 0;
  std::uint64_t boundary_hits = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<LevelInfo> levels;

  std::vector<ConvergenceRow> rows_for(const std::string& statistic) const;
  /// Largest abs_error among rows of `level`.
  double level_error(int level) const;
};

std::string convergence_csv(const ConvergenceTable& table);
std::string levels_csv(const ConvergenceTable& table);

struct ExperimentConfig {
  Graph graph = build_graph(1, {});
  Matrix birth;
  Matrix death;
  ScalingSchedule schedule;
  double t = 1.0;
  int replicas = 2'000;
  std::uint64_t seed = 1;
  std::uint64_t max_events = 100'000'000;
  int grid_points = 200;  // fluid observation grid on [0, t]
  double rk4_dt = 1e-3;
  int threads = 0;  // 0: hardware concurrency
};

/// Per level: N replicas of ε_n ξ(t ε_n^{-2}) compared with the exact Gaussian
/// transition law of du = Au dt + √2 dW from u. Statistics "mean[x]" and
/// "cov[x,y]" (x <= y), each with its Monte-Carlo standard error.
ConvergenceTable run_diffusion_experiment(const ExperimentConfig& config);

/// Per level: for each replica, the sup over the observation grid of
/// ‖ε_n ξ(s ε_n^{-1}) - γ(s)‖_∞ against the RK4 fluid path. Statistic
/// "sup_distance" is the replica mean (mc_std_error its standard error);
/// "sup_distance_max" the worst replica.
ConvergenceTable run_fluid_experiment(const ExperimentConfig& config);

/// Smooth bump amplitude·exp(-1/(1 - ‖u-c‖²/ρ²)) inside the ball, 0 outside.
struct BumpFunction {
  Vector center;
  double radius = 1.0;
  double amplitude = 1.0;

  double value(const Vector& u) const;
  Vector gradient(const Vector& u) const;
  /// ∂²f/∂u_x² for each x.
  Vector hessian_diagonal(const Vector& u) const;
};

struct GeneratorCheckConfig {
  Graph graph = build_graph(1, {});
  Matrix birth;
  Matrix death;
  ScalingSchedule schedule;  // diffusion scaling
  BumpFunction bump;
  int grid_points = 101;  // per dimension over [c-ρ, c+ρ]
};

/// Lf(u) = Σ f''_xx(u) + Σ (Au)_x f'_x(u).
double limit_generator(const Matrix& a, const BumpFunction& f, const Vector& u);

/// ε^{-2} Σ_x [(f(ε(ξ+e_x)) - f(εξ)) birth_x + (f(ε(ξ-e_x)) - f(εξ)) death_x]
/// for the diffusion-scaled chain `spec`, boundary indicators included.
double rescaled_generator(const ChainSpec& spec, double epsilon, const BumpFunction& f,
                          const Configuration& xi);

/// Per level: E_n = max over grid points u inside the support of
/// |L_n f(ε_n round(u/ε_n)) - Lf(u)|. Statistics "generator_error" (E_n) and
/// "error_over_epsilon" (E_n/ε_n). Throws SupportNotCovered when the bump's
/// support leaves [-ε_n l_n, ε_n l_n]^Λ.
ConvergenceTable generator_convergence_check(const GeneratorCheckConfig& config);

}  // namespace ibd
