#pragma once

#include "kova/targets.hpp"
#include "kova/value_model.hpp"

namespace kova {

/// Covariance policies for the evolution noise P_v and observation noise P_n.
///
/// Evolution noise is either zero (deterministic parameters between steps)
/// or fading memory, P_v = eta/(1-eta) * P, so the predicted covariance
/// becomes P/(1-eta). Observation noise is diagonal: the batch-size policy
/// uses sigma_i = N, which recovers the plain mean-squared TD loss scale;
/// the max-ratio policy inflates sigma_i = N * max(1, 1/(ratio_i + epsilon))
/// for samples whose policy ratio pi_old/pi_new drifted below one.
struct NoiseModel {
  enum class Evolution { Zero, FadingMemory };
  enum class Observation { BatchSize, MaxRatio };

  Evolution evolution = Evolution::Zero;
  double eta = 0.0;  // fading-memory coefficient, in [0, 1)
  Observation observation = Observation::BatchSize;
  double epsilon = 1e-8;  // max-ratio division guard

  static NoiseModel zero_evolution_batch_size() { return NoiseModel{}; }
  static NoiseModel fading_memory(double eta_value,
                                  Observation obs = Observation::BatchSize,
                                  double eps = 1e-8);
};

struct KovaConfig {
  double learning_rate = 1.0;     // alpha in (0, 1], applied to both updates
  double initial_cov_scale = 1.0; // p0, prior covariance is p0 * I
  NoiseModel noise;
  /// Absolute diagonal jitter added when the innovation factorization fails;
  /// the retry uses max(jitter, 1e-9 * trace(P_y)/N) so a zero setting still
  /// gets a scale-aware floor.
  double jitter = 0.0;
};

/// The evolving posterior over parameters: estimate theta_hat and error
/// covariance P, plus the update counter. States are value types; update()
/// returns a fresh state, so snapshots can be shared read-only.
struct OptimizerState {
  Vector theta_hat;
  Matrix cov;
  long step_count = 0;
};

/// Fresh state with covariance p0 * I. Warm starts (reusing a previous
/// policy's theta_hat and cov) are plain struct assignment with step_count
/// reset by the caller.
OptimizerState init_state(int d, const Vector& theta0, const KovaConfig& cfg);

/// Predicted error covariance before seeing the batch: P unchanged under
/// zero evolution noise, P/(1-eta) under fading memory.
Matrix predict(const OptimizerState& state, const NoiseModel& noise);

/// Diagonal of the N x N observation-noise covariance for a batch.
Vector observation_noise(const NoiseModel& noise, const Batch& batch);

/// Kalman gain K = P_pred J (J^T P_pred J + P_n)^{-1}, solved by Cholesky
/// factorization of the N x N innovation covariance. On factorization
/// failure one retry adds jitter to the diagonal; a second failure throws
/// with a conditioning diagnosis.
Matrix kalman_gain(const Matrix& p_pred, const Matrix& jac, const Matrix& p_n,
                   double jitter = 0.0);

/// One full optimizer iteration: predict, linearize at the predicted
/// estimate, form the innovation covariance and gain, then apply
///   theta <- theta + alpha K (y - h(theta))
///   P     <- P_pred - alpha K P_y K^T
/// with re-symmetrization. Throws on non-finite parameters (divergence) and
/// propagates gain factorization errors.
OptimizerState update(const OptimizerState& state, const Batch& batch,
                      const ValueModel& model, const KovaConfig& cfg);

/// True iff new_cov <= prev_pred in the Loewner order up to tolerance,
/// i.e. the largest eigenvalue of (new_cov - prev_pred) is <= tol.
bool loewner_decrease_check(const Matrix& prev_pred, const Matrix& new_cov,
                            double tol = 1e-8);

}  // namespace kova
