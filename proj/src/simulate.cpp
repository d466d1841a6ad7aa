#include "ibd/simulate.hpp"

#include <sstream>

#include "ibd/error.hpp"
#include "ibd/format.hpp"

namespace ibd {

ChainSimulator::ChainSimulator(const ChainSpec& spec, Configuration initial, std::uint64_t seed)
    : spec_(spec), state_(std::move(initial)), rng_(make_rng(seed)) {
  spec_.check(state_);
  const auto slots = 2 * static_cast<std::size_t>(spec_.num_vertices());
  while (leaves_ < slots) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
  for (int x = 0; x < spec_.num_vertices(); ++x) refresh_vertex(x);
}

void ChainSimulator::set_leaf(std::size_t leaf, double rate) {
  std::size_t node = leaves_ + leaf;
  tree_[node] = rate;
  for (node /= 2; node >= 1; node /= 2) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

void ChainSimulator::refresh_vertex(int x) {
  set_leaf(2 * static_cast<std::size_t>(x), birth_rate(spec_, state_, x));
  set_leaf(2 * static_cast<std::size_t>(x) + 1, death_rate(spec_, state_, x));
}

std::size_t ChainSimulator::sample_leaf(double target) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const double left = tree_[2 * node];
    if (target < left || tree_[2 * node + 1] <= 0.0) {
      node = 2 * node;
    } else {
      target -= left;
      node = 2 * node + 1;
    }
  }
  // Rounding can steer the descent onto a zero-rate leaf; fall back to the
  // nearest positive one.
  std::size_t leaf = node - leaves_;
  if (tree_[node] > 0.0) return leaf;
  for (std::size_t k = leaf; k-- > 0;)
    if (tree_[leaves_ + k] > 0.0) return k;
  for (std::size_t k = leaf + 1; k < leaves_; ++k)
    if (tree_[leaves_ + k] > 0.0) return k;
  return leaf;
}

JumpEvent ChainSimulator::step(double dt) {
  if (++events_ > max_events_) {
    throw BudgetExceeded("event budget of " + std::to_string(max_events_) + " exhausted at t = " +
                         std::to_string(time_));
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t leaf = sample_leaf(uniform(rng_) * total_rate());
  const int x = static_cast<int>(leaf / 2);
  const int sign = (leaf % 2 == 0) ? 1 : -1;
  time_ += dt;
  state_[x] += sign;
  if (state_[x] == spec_.upper() || state_[x] == -spec_.lower()) ++boundary_hits_;
  refresh_vertex(x);
  for (int y : spec_.graph().neighbors(x)) refresh_vertex(y);
  return {time_, x, sign};
}

Trajectory simulate(const ChainSpec& spec, const Configuration& initial, double t_end,
                    std::uint64_t seed) {
  Trajectory out{initial, {}};
  ChainSimulator sim(spec, initial, seed);
  sim.run_until(t_end, [&](const JumpEvent& e) { out.events.push_back(e); });
  return out;
}

Configuration replay(const ChainSpec& spec, const Trajectory& trajectory) {
  spec.check(trajectory.initial);
  Configuration xi = trajectory.initial;
  double last = 0.0;
  for (std::size_t k = 0; k < trajectory.events.size(); ++k) {
    const auto& e = trajectory.events[k];
    if (e.vertex < 0 || e.vertex >= spec.num_vertices() || (e.sign != 1 && e.sign != -1)) {
      throw InvalidConfiguration("malformed event " + std::to_string(k));
    }
    if (e.time <= last && k > 0) {
      throw InvalidConfiguration("event times not strictly increasing at event " +
                                 std::to_string(k));
    }
    last = e.time;
    xi[e.vertex] += e.sign;
    if (xi[e.vertex] < -spec.lower() || xi[e.vertex] > spec.upper()) {
      throw InvalidConfiguration("event " + std::to_string(k) + " leaves the box at vertex " +
                                 std::to_string(e.vertex));
    }
  }
  return xi;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  out << "t,vertex,sign\n";
  for (const auto& e : trajectory.events) {
    out << format_double(e.time) << "," << e.vertex << "," << e.sign << "\n";
  }
  return out.str();
}

}  // namespace ibd
