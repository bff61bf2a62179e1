#pragma once

#include "kova/value_model.hpp"

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

namespace kova {

/// One environment step under a fixed policy.
struct Transition {
  Vector state;
  Vector action;  // empty for pure V-function targets
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;
};

/// Ordered steps from a single rollout.
using Trajectory = std::vector<Transition>;

/// N inputs with their target labels and optional policy ratios
/// pi_old / pi_new per sample. An empty ratios vector means all ones
/// (pure policy evaluation).
struct Batch {
  std::vector<Vector> inputs;
  Vector targets;
  Vector ratios;

  int size() const { return static_cast<int>(inputs.size()); }
};

/// k-step bootstrapped state-value target
///   sum_{i=0}^{k-1} gamma^i r_{m+i} + gamma^k V(s_{m+k}; theta_target).
/// A terminal inside the window drops the bootstrap term; if the trajectory
/// runs out before m+k without terminating, the bootstrap uses the last
/// observed next state.
double kstep_v_target(const Trajectory& traj, int m, int k, double gamma,
                      const Vector& theta_target, const ValueModel& model);

/// GAE-style target
///   sum_i (gamma*lambda)^i (r_{m+i} + gamma V(s_{m+i+1}) - V(s_{m+i})) + V(s_m)
/// with every value taken at theta_target and the sum truncated at the
/// trajectory end (terminal value 0).
double gae_target(const Trajectory& traj, int m, double gamma, double lambda,
                  const Vector& theta_target, const ValueModel& model);

/// r + gamma Q(s', pi(s'); theta_target), zero bootstrap on terminal. The
/// model consumes concatenated state-action inputs.
double one_step_q_target(const Transition& tr, double gamma, const Vector& theta_target,
                         const ValueModel& model, const Vector& policy_next_action);

/// r + gamma max_{a'} Q(s', a'; theta_target) over a finite action set,
/// zero bootstrap on terminal. Ties resolve to the lowest action index.
double max_q_target(const Transition& tr, double gamma, const Vector& theta_target,
                    const ValueModel& model, const std::vector<Vector>& action_set);

struct TargetSpec {
  enum class Type { KStepV, Gae };
  Type type = Type::KStepV;
  int k = 1;
  double gamma = 0.99;
  double lambda = 0.95;
};

/// Holds rollout data and hands out deterministic batches. Two storage
/// modes: trajectory-store keeps whole trajectories (anchors are (traj, m)
/// pairs), transition-replay keeps isolated transitions. Single writer;
/// sampling advances the internal RNG, so interleave add/sample calls the
/// same way to reproduce a stream.
class SampleGenerator {
 public:
  enum class Source { TrajectoryStore, TransitionReplay };

  SampleGenerator(Source source, std::size_t capacity, std::uint64_t seed);

  void add_trajectory(Trajectory traj);
  void add_transition(Transition tr);

  /// Number of usable anchors (stored transitions).
  std::size_t size() const { return n_transitions_; }
  Source source() const { return source_; }

  /// Sample n distinct anchors and build their targets with theta_target.
  /// Throws when fewer than n anchors are stored, naming both counts.
  Batch sample_batch(int n, const TargetSpec& spec, const Vector& theta_target,
                     const ValueModel& model);

 private:
  void evict_to_capacity();

  Source source_;
  std::size_t capacity_;
  std::deque<Trajectory> store_;
  std::size_t n_transitions_ = 0;
  std::mt19937_64 rng_;
};

/// Free-function form of SampleGenerator::sample_batch.
Batch sample_batch(SampleGenerator& gen, int n, const TargetSpec& spec,
                   const Vector& theta_target, const ValueModel& model);

}  // namespace kova
