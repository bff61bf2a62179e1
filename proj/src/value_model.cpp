#include "kova/value_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace kova {

namespace {

int mlp_param_count(int input_dim, const std::vector<int>& hidden) {
  int count = 0;
  int in = input_dim;
  for (int w : hidden) {
    count += w * in + w;
    in = w;
  }
  count += in + 1;  // linear scalar output layer
  return count;
}

}  // namespace

ValueModel::ValueModel(Kind kind, int input_dim, int param_dim)
    : kind_(kind), input_dim_(input_dim), param_dim_(param_dim) {}

ValueModel ValueModel::linear(int input_dim, int feature_dim, FeatureMap phi) {
  if (input_dim < 1 || feature_dim < 1)
    throw std::invalid_argument("ValueModel::linear: dimensions must be positive");
  if (!phi) throw std::invalid_argument("ValueModel::linear: feature map is empty");
  ValueModel m(Kind::Linear, input_dim, feature_dim);
  m.phi_ = std::move(phi);
  return m;
}

ValueModel ValueModel::linear_identity(int input_dim) {
  return linear(input_dim, input_dim, [](const Vector& u) { return u; });
}

ValueModel ValueModel::mlp(int input_dim, const std::vector<int>& hidden_widths) {
  if (input_dim < 1)
    throw std::invalid_argument("ValueModel::mlp: input_dim must be positive");
  for (int w : hidden_widths)
    if (w < 1) throw std::invalid_argument("ValueModel::mlp: hidden widths must be positive");
  ValueModel m(Kind::Mlp, input_dim, mlp_param_count(input_dim, hidden_widths));
  m.hidden_widths_ = hidden_widths;
  return m;
}

void ValueModel::check_theta(const Vector& theta) const {
  if (theta.size() != param_dim_)
    throw std::invalid_argument("parameter vector has length " +
                                std::to_string(theta.size()) + ", model expects " +
                                std::to_string(param_dim_));
}

void ValueModel::check_input(const Vector& input) const {
  if (input.size() != input_dim_)
    throw std::invalid_argument("input has dimension " + std::to_string(input.size()) +
                                ", model expects " + std::to_string(input_dim_));
}

Vector ValueModel::features(const Vector& input) const {
  if (kind_ != Kind::Linear)
    throw std::invalid_argument("features: model is not linear-in-features");
  check_input(input);
  Vector f = phi_(input);
  if (f.size() != param_dim_)
    throw std::invalid_argument("feature map produced " + std::to_string(f.size()) +
                                " features, model expects " + std::to_string(param_dim_));
  return f;
}

double ValueModel::mlp_forward(const Vector& theta, const Vector& input,
                               std::vector<Vector>* activations) const {
  // activations, when requested, holds the post-activation of every layer
  // starting with the input itself; needed for the backward pass.
  Vector z = input;
  if (activations) {
    activations->clear();
    activations->push_back(z);
  }
  int offset = 0;
  int in = input_dim_;
  for (int w : hidden_widths_) {
    Eigen::Map<const Matrix> weights(theta.data() + offset, in, w);
    offset += w * in;
    Eigen::Map<const Vector> bias(theta.data() + offset, w);
    offset += w;
    z = (weights.transpose() * z + bias).array().tanh().matrix();
    if (activations) activations->push_back(z);
    in = w;
  }
  Eigen::Map<const Vector> out_w(theta.data() + offset, in);
  double out_b = theta(offset + in);
  return out_w.dot(z) + out_b;
}

void ValueModel::mlp_backward(const Vector& theta, const std::vector<Vector>& activations,
                              Eigen::Ref<Vector> grad) const {
  const int n_hidden = static_cast<int>(hidden_widths_.size());

  // Offsets of each layer's weight block in the flat parameter vector.
  std::vector<int> offsets(n_hidden + 1);
  int offset = 0;
  int in = input_dim_;
  for (int l = 0; l < n_hidden; ++l) {
    offsets[l] = offset;
    offset += hidden_widths_[l] * in + hidden_widths_[l];
    in = hidden_widths_[l];
  }
  offsets[n_hidden] = offset;

  // Output layer: d out / d w = z_last, d out / d b = 1.
  const Vector& z_last = activations[n_hidden];
  grad.segment(offsets[n_hidden], in) = z_last;
  grad(offsets[n_hidden] + in) = 1.0;

  // delta carries d out / d a_l (pre-activation sensitivities).
  Eigen::Map<const Vector> out_w(theta.data() + offsets[n_hidden], in);
  Vector delta = out_w.cwiseProduct((1.0 - z_last.array().square()).matrix());

  for (int l = n_hidden - 1; l >= 0; --l) {
    const Vector& z_prev = activations[l];
    const int rows = static_cast<int>(z_prev.size());
    const int cols = hidden_widths_[l];
    Eigen::Map<Matrix> grad_w(grad.data() + offsets[l], rows, cols);
    grad_w = z_prev * delta.transpose();
    grad.segment(offsets[l] + rows * cols, cols) = delta;
    if (l > 0) {
      Eigen::Map<const Matrix> weights(theta.data() + offsets[l], rows, cols);
      delta = (weights * delta).cwiseProduct((1.0 - z_prev.array().square()).matrix());
    }
  }
}

double ValueModel::forward_one(const Vector& theta, const Vector& input) const {
  check_theta(theta);
  check_input(input);
  if (kind_ == Kind::Linear) return theta.dot(features(input));
  return mlp_forward(theta, input, nullptr);
}

Vector ValueModel::forward(const Vector& theta, const std::vector<Vector>& inputs) const {
  check_theta(theta);
  Vector out(static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_input(inputs[i]);
    out(static_cast<Eigen::Index>(i)) =
        kind_ == Kind::Linear ? theta.dot(features(inputs[i]))
                              : mlp_forward(theta, inputs[i], nullptr);
  }
  return out;
}

Matrix ValueModel::jacobian(const Vector& theta, const std::vector<Vector>& inputs) const {
  check_theta(theta);
  Matrix jac(param_dim_, static_cast<Eigen::Index>(inputs.size()));
  std::vector<Vector> activations;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_input(inputs[i]);
    auto col = jac.col(static_cast<Eigen::Index>(i));
    if (kind_ == Kind::Linear) {
      col = features(inputs[i]);
    } else {
      mlp_forward(theta, inputs[i], &activations);
      Vector g(param_dim_);
      mlp_backward(theta, activations, g);
      col = g;
    }
  }
  return jac;
}

Vector ValueModel::init_params(std::uint64_t seed, double scale) const {
  if (scale < 0.0) throw std::invalid_argument("init_params: scale must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vector theta(param_dim_);
  for (int i = 0; i < param_dim_; ++i) theta(i) = scale == 0.0 ? 0.0 : unif(rng);
  return theta;
}

}  // namespace kova
