#include "kova/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace kova {

namespace {

void check_anchor(const Trajectory& traj, int m) {
  if (m < 0 || m >= static_cast<int>(traj.size()))
    throw std::invalid_argument("target anchor " + std::to_string(m) +
                                " outside trajectory of length " +
                                std::to_string(traj.size()));
}

}  // namespace

double kstep_v_target(const Trajectory& traj, int m, int k, double gamma,
                      const Vector& theta_target, const ValueModel& model) {
  check_anchor(traj, m);
  if (k < 1) throw std::invalid_argument("kstep_v_target: k must be >= 1");

  double acc = 0.0;
  double discount = 1.0;
  const int last = static_cast<int>(traj.size()) - 1;
  for (int i = 0; i < k; ++i) {
    const int t = m + i;
    if (t > last) break;
    const Transition& tr = traj[t];
    acc += discount * tr.reward;
    discount *= gamma;
    if (tr.terminal) return acc;  // zero bootstrap past a terminal
    if (i == k - 1 || t == last) return acc + discount * model.forward_one(theta_target, tr.next_state);
  }
  return acc;
}

double gae_target(const Trajectory& traj, int m, double gamma, double lambda,
                  const Vector& theta_target, const ValueModel& model) {
  check_anchor(traj, m);

  double acc = 0.0;
  double weight = 1.0;
  const int last = static_cast<int>(traj.size()) - 1;
  for (int t = m; t <= last; ++t) {
    const Transition& tr = traj[t];
    const double v_next = tr.terminal ? 0.0 : model.forward_one(theta_target, tr.next_state);
    const double v_here = model.forward_one(theta_target, tr.state);
    acc += weight * (tr.reward + gamma * v_next - v_here);
    if (tr.terminal) break;
    weight *= gamma * lambda;
    if (weight == 0.0) break;
  }
  return acc + model.forward_one(theta_target, traj[m].state);
}

double one_step_q_target(const Transition& tr, double gamma, const Vector& theta_target,
                         const ValueModel& model, const Vector& policy_next_action) {
  if (tr.terminal) return tr.reward;
  Vector input(tr.next_state.size() + policy_next_action.size());
  input << tr.next_state, policy_next_action;
  return tr.reward + gamma * model.forward_one(theta_target, input);
}

double max_q_target(const Transition& tr, double gamma, const Vector& theta_target,
                    const ValueModel& model, const std::vector<Vector>& action_set) {
  if (action_set.empty()) throw std::invalid_argument("max_q_target: empty action set");
  if (tr.terminal) return tr.reward;
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& a : action_set) {
    Vector input(tr.next_state.size() + a.size());
    input << tr.next_state, a;
    const double q = model.forward_one(theta_target, input);
    if (q > best) best = q;  // strict comparison keeps the lowest index on ties
  }
  return tr.reward + gamma * best;
}

SampleGenerator::SampleGenerator(Source source, std::size_t capacity, std::uint64_t seed)
    : source_(source), capacity_(capacity), rng_(seed) {
  if (capacity_ == 0) throw std::invalid_argument("SampleGenerator: capacity must be >= 1");
}

void SampleGenerator::add_trajectory(Trajectory traj) {
  if (traj.empty()) return;
  if (source_ == Source::TransitionReplay) {
    for (Transition& tr : traj) add_transition(std::move(tr));
    return;
  }
  n_transitions_ += traj.size();
  store_.push_back(std::move(traj));
  evict_to_capacity();
}

void SampleGenerator::add_transition(Transition tr) {
  if (source_ == Source::TrajectoryStore) {
    add_trajectory(Trajectory{std::move(tr)});
    return;
  }
  n_transitions_ += 1;
  store_.push_back(Trajectory{std::move(tr)});
  evict_to_capacity();
}

void SampleGenerator::evict_to_capacity() {
  while (n_transitions_ > capacity_ && store_.size() > 1) {
    n_transitions_ -= store_.front().size();
    store_.pop_front();
  }
}

Batch SampleGenerator::sample_batch(int n, const TargetSpec& spec, const Vector& theta_target,
                                    const ValueModel& model) {
  if (n < 1) throw std::invalid_argument("sample_batch: batch size must be >= 1");
  if (static_cast<std::size_t>(n) > n_transitions_)
    throw std::invalid_argument("sample_batch: need " + std::to_string(n) +
                                " anchors but only " + std::to_string(n_transitions_) +
                                " are stored");

  // Flat anchor index -> (trajectory, step).
  std::vector<std::pair<int, int>> anchors;
  anchors.reserve(n_transitions_);
  for (int t = 0; t < static_cast<int>(store_.size()); ++t)
    for (int m = 0; m < static_cast<int>(store_[t].size()); ++m) anchors.emplace_back(t, m);

  // Partial Fisher-Yates: the first n entries become a uniform sample
  // without replacement.
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, anchors.size() - 1);
    std::swap(anchors[i], anchors[pick(rng_)]);
  }

  Batch batch;
  batch.inputs.reserve(n);
  batch.targets.resize(n);
  batch.ratios = Vector::Ones(n);
  for (int i = 0; i < n; ++i) {
    const auto [t, m] = anchors[i];
    const Trajectory& traj = store_[t];
    batch.inputs.push_back(traj[m].state);
    batch.targets(i) =
        spec.type == TargetSpec::Type::KStepV
            ? kstep_v_target(traj, m, spec.k, spec.gamma, theta_target, model)
            : gae_target(traj, m, spec.gamma, spec.lambda, theta_target, model);
  }
  if (!batch.targets.allFinite())
    throw std::runtime_error("sample_batch: produced non-finite targets");
  return batch;
}

Batch sample_batch(SampleGenerator& gen, int n, const TargetSpec& spec,
                   const Vector& theta_target, const ValueModel& model) {
  return gen.sample_batch(n, spec, theta_target, model);
}

}  // namespace kova
