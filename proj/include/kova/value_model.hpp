#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace kova {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Feature map of a linear-in-features model: input vector -> feature vector.
using FeatureMap = std::function<Vector(const Vector&)>;

/// Parametric value approximator h(u; theta) with analytic Jacobians.
///
/// Two families are supported:
///   - linear-in-features: h(u; theta) = theta . phi(u)
///   - fully connected MLP with tanh hidden units and a linear scalar output
///
/// Parameters are flattened layer by layer, weights row-major followed by
/// biases; all code in this library shares that layout. Models are immutable
/// after construction and all evaluation is pure, so a single ValueModel may
/// be used from multiple threads.
class ValueModel {
 public:
  enum class Kind { Linear, Mlp };

  /// Linear model with an explicit feature map producing feature_dim features.
  static ValueModel linear(int input_dim, int feature_dim, FeatureMap phi);

  /// Linear model with identity features, phi(u) = u. With one-hot encoded
  /// states this is the tabular value function.
  static ValueModel linear_identity(int input_dim);

  /// MLP input_dim -> hidden_widths... -> 1 with tanh hidden activations.
  static ValueModel mlp(int input_dim, const std::vector<int>& hidden_widths);

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  int param_dim() const { return param_dim_; }
  bool is_linear() const { return kind_ == Kind::Linear; }
  const std::vector<int>& layer_widths() const { return hidden_widths_; }

  /// h(u; theta) for a single input.
  double forward_one(const Vector& theta, const Vector& input) const;

  /// Stacked evaluation: entry i is h(inputs[i]; theta). N may be zero.
  Vector forward(const Vector& theta, const std::vector<Vector>& inputs) const;

  /// d x N Jacobian; column i is the gradient of h(inputs[i]; .) at theta.
  Matrix jacobian(const Vector& theta, const std::vector<Vector>& inputs) const;

  /// Features phi(u) of a linear model (throws for MLPs).
  Vector features(const Vector& input) const;

  /// Deterministic i.i.d. uniform [-scale, scale] initialization.
  Vector init_params(std::uint64_t seed, double scale) const;

 private:
  ValueModel(Kind kind, int input_dim, int param_dim);

  void check_theta(const Vector& theta) const;
  void check_input(const Vector& input) const;

  double mlp_forward(const Vector& theta, const Vector& input,
                     std::vector<Vector>* activations) const;
  void mlp_backward(const Vector& theta, const std::vector<Vector>& activations,
                    Eigen::Ref<Vector> grad) const;

  Kind kind_;
  int input_dim_ = 0;
  int param_dim_ = 0;
  std::vector<int> hidden_widths_;  // MLP only
  FeatureMap phi_;                  // linear only
};

}  // namespace kova
