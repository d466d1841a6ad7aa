#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibd/chain.hpp"
#include "ibd/rng.hpp"

namespace ibd {

struct JumpEvent {
  double time;
  int vertex;
  int sign;  // +1 birth, -1 death
};

struct Trajectory {
  Configuration initial;
  std::vector<JumpEvent> events;  // strictly increasing times
};

/// Exact event-driven simulation (exponential clock race). Rates live in a
/// binary sum tree; after a jump at x only x and its neighbours are
/// recomputed.
class ChainSimulator {
 public:
  ChainSimulator(const ChainSpec& spec, Configuration initial, std::uint64_t seed);

  /// Runs until `t_end`, calling on_event(const JumpEvent&) after each jump.
  /// The clock then sits exactly at t_end (memorylessness makes the pending
  /// exponential clock disposable). Throws BudgetExceeded once the lifetime
  /// event count passes `max_events`.
  template <class OnEvent>
  void run_until(double t_end, OnEvent&& on_event);
  void run_until(double t_end) {
    run_until(t_end, [](const JumpEvent&) {});
  }

  const Configuration& state() const { return state_; }
  double time() const { return time_; }
  std::uint64_t event_count() const { return events_; }
  /// Jumps that landed a spin on -l or r.
  std::uint64_t boundary_hits() const { return boundary_hits_; }
  double total_rate() const { return tree_[1]; }

  void set_event_budget(std::uint64_t max_events) { max_events_ = max_events; }

 private:
  void refresh_vertex(int x);
  void set_leaf(std::size_t leaf, double rate);
  std::size_t sample_leaf(double target) const;
  JumpEvent step(double dt);

  const ChainSpec& spec_;
  Configuration state_;
  Rng rng_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t boundary_hits_ = 0;
  std::uint64_t max_events_ = UINT64_MAX;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;  // 1-based heap; leaf 2x births, 2x+1 deaths
};

Trajectory simulate(const ChainSpec& spec, const Configuration& initial, double t_end,
                    std::uint64_t seed);

/// Applies every event to the initial configuration. Throws
/// InvalidConfiguration if an event would leave the box or times are not
/// strictly increasing.
Configuration replay(const ChainSpec& spec, const Trajectory& trajectory);

/// "t,vertex,sign".
std::string trajectory_csv(const Trajectory& trajectory);

// ---------------------------------------------------------------------------

template <class OnEvent>
void ChainSimulator::run_until(double t_end, OnEvent&& on_event) {
  std::exponential_distribution<double> clock(1.0);
  while (true) {
    const double total = total_rate();
    if (total <= 0.0) break;
    const double dt = clock(rng_) / total;
    if (time_ + dt > t_end) break;
    on_event(step(dt));
  }
  if (t_end > time_) time_ = t_end;
}

}  // namespace ibd
