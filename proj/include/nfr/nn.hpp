#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nfr/autodiff.hpp"
#include "nfr/rng.hpp"

namespace nfr {

enum class Activation { kRelu, kTanh, kSigmoid, kNone };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kNone: return "none";
  }
  return "relu";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "none") return Activation::kNone;
  throw ConfigError("unknown activation '" + s + "'");
}

// Fully-connected network description. Hidden layers run
// linear -> (layer norm) -> activation; the output layer is a plain affine
// map. The flat parameter layout is derivable from the spec alone:
// per layer, column-major W (in x out), then b, then for normalized hidden
// layers the layer-norm gain and bias.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int output_dim = 0;
  Activation activation = Activation::kRelu;
  bool layer_norm = false;

  int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }

  void validate() const {
    if (input_dim < 1 || output_dim < 1) {
      throw ConfigError("MlpSpec: input/output dims must be >= 1");
    }
    for (int h : hidden_dims) {
      if (h < 1) throw ConfigError("MlpSpec: hidden dims must be >= 1");
    }
  }
};

struct MlpLayerLayout {
  int in = 0, out = 0;
  Eigen::Index weight_off = 0;
  Eigen::Index bias_off = 0;
  Eigen::Index norm_gain_off = -1;  // -1 when the layer has no norm
  Eigen::Index norm_bias_off = -1;
  bool hidden = true;
};

// Flat-vector offsets for every layer of a spec.
inline std::vector<MlpLayerLayout> mlp_layout(const MlpSpec& spec) {
  spec.validate();
  std::vector<MlpLayerLayout> layers;
  Eigen::Index off = 0;
  int in = spec.input_dim;
  int n_layers = spec.num_layers();
  for (int i = 0; i < n_layers; ++i) {
    bool hidden = i + 1 < n_layers;
    int out = hidden ? spec.hidden_dims[i] : spec.output_dim;
    MlpLayerLayout l;
    l.in = in;
    l.out = out;
    l.hidden = hidden;
    l.weight_off = off;
    off += static_cast<Eigen::Index>(in) * out;
    l.bias_off = off;
    off += out;
    if (hidden && spec.layer_norm) {
      l.norm_gain_off = off;
      off += out;
      l.norm_bias_off = off;
      off += out;
    }
    layers.push_back(l);
    in = out;
  }
  return layers;
}

inline Eigen::Index mlp_param_count(const MlpSpec& spec) {
  auto layers = mlp_layout(spec);
  const auto& last = layers.back();
  return last.bias_off + last.out;
}

// He-uniform for the activated layers, Xavier-uniform for the output layer,
// gain 1 / bias 0 for layer norm.
inline Eigen::VectorXd mlp_init(const MlpSpec& spec, Rng& rng) {
  auto layers = mlp_layout(spec);
  Eigen::VectorXd params(mlp_param_count(spec));
  for (const auto& l : layers) {
    double bound = l.hidden ? std::sqrt(6.0 / l.in)
                            : std::sqrt(6.0 / (l.in + l.out));
    for (Eigen::Index i = 0; i < Eigen::Index(l.in) * l.out; ++i) {
      params(l.weight_off + i) = rng.uniform(-bound, bound);
    }
    for (int i = 0; i < l.out; ++i) params(l.bias_off + i) = 0.0;
    if (l.norm_gain_off >= 0) {
      for (int i = 0; i < l.out; ++i) {
        params(l.norm_gain_off + i) = 1.0;
        params(l.norm_bias_off + i) = 0.0;
      }
    }
  }
  return params;
}

template <typename T>
Tensor<T> apply_activation(const Tensor<T>& x, Activation act) {
  switch (act) {
    case Activation::kRelu: return relu(x);
    case Activation::kTanh: return tanh_fn(x);
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kNone: return x;
  }
  return x;
}

// Forward pass through the network described by `spec`, reading weights from
// the flat column vector `params`. Differentiable w.r.t. both params and x.
template <typename T>
Tensor<T> mlp_forward(const Tensor<T>& params, const MlpSpec& spec,
                      const Tensor<T>& x) {
  if (params.cols() != 1 || params.rows() != mlp_param_count(spec)) {
    throw ConfigError("mlp_forward: parameter vector has " +
                      std::to_string(params.rows()) + " entries, spec needs " +
                      std::to_string(mlp_param_count(spec)));
  }
  if (x.cols() != spec.input_dim) {
    throw ConfigError("mlp_forward: input has " + std::to_string(x.cols()) +
                      " columns, spec expects " +
                      std::to_string(spec.input_dim));
  }
  Tensor<T> h = x;
  for (const auto& l : mlp_layout(spec)) {
    Tensor<T> w =
        reshape(segment(params, l.weight_off, Eigen::Index(l.in) * l.out),
                l.in, l.out);
    Tensor<T> b = reshape(segment(params, l.bias_off, l.out), 1, l.out);
    h = add_rowvec(h * w, b);
    if (l.hidden) {
      if (l.norm_gain_off >= 0) {
        Tensor<T> gain =
            reshape(segment(params, l.norm_gain_off, l.out), 1, l.out);
        Tensor<T> bias =
            reshape(segment(params, l.norm_bias_off, l.out), 1, l.out);
        h = add_rowvec(mul_rowvec(row_standardize(h), gain), bias);
      }
      h = apply_activation(h, spec.activation);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// LSTM cell with a scalar linear head (the step-length predictor).
// ---------------------------------------------------------------------------

struct LstmSpec {
  int input_dim = 0;
  int hidden_dim = 0;

  void validate() const {
    if (input_dim < 1 || hidden_dim < 1) {
      throw ConfigError("LstmSpec: dims must be >= 1");
    }
  }
};

// Layout: Wx (in x 4H), Wh (H x 4H), b (4H), head weight (H), head bias (1).
// Gate order within the 4H block: input, forget, candidate, output.
inline Eigen::Index lstm_param_count(const LstmSpec& spec) {
  spec.validate();
  Eigen::Index n = spec.input_dim, h = spec.hidden_dim;
  return n * 4 * h + h * 4 * h + 4 * h + h + 1;
}

inline Eigen::VectorXd lstm_init(const LstmSpec& spec, Rng& rng) {
  Eigen::Index count = lstm_param_count(spec);
  Eigen::VectorXd params(count);
  double bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
  for (Eigen::Index i = 0; i < count; ++i) {
    params(i) = rng.uniform(-bound, bound);
  }
  // Forget-gate bias starts at 1 so early steps keep their cell state.
  Eigen::Index n = spec.input_dim, h = spec.hidden_dim;
  Eigen::Index bias_off = n * 4 * h + h * 4 * h;
  for (Eigen::Index i = 0; i < h; ++i) params(bias_off + h + i) = 1.0;
  params(count - 1) = 0.0;  // head bias
  return params;
}

template <typename T>
struct LstmState {
  Tensor<T> h;
  Tensor<T> c;
};

template <typename T>
LstmState<T> lstm_zero_state(const LstmSpec& spec, Eigen::Index batch) {
  return {Tensor<T>::constant(Mat<T>::Zero(batch, spec.hidden_dim)),
          Tensor<T>::constant(Mat<T>::Zero(batch, spec.hidden_dim))};
}

template <typename T>
struct LstmOutput {
  Tensor<T> out;  // batch x 1 step length from the linear head
  LstmState<T> state;
};

// One cell update with standard gate equations; `out` is a scalar per batch
// row read off the new hidden state by a linear head.
template <typename T>
LstmOutput<T> lstm_cell(const Tensor<T>& params, const LstmSpec& spec,
                        const Tensor<T>& v, const LstmState<T>& state) {
  if (params.cols() != 1 || params.rows() != lstm_param_count(spec)) {
    throw ConfigError("lstm_cell: parameter vector has " +
                      std::to_string(params.rows()) + " entries, spec needs " +
                      std::to_string(lstm_param_count(spec)));
  }
  if (v.cols() != spec.input_dim) {
    throw ConfigError("lstm_cell: input has " + std::to_string(v.cols()) +
                      " columns, spec expects " +
                      std::to_string(spec.input_dim));
  }
  const Eigen::Index n = spec.input_dim, h = spec.hidden_dim;
  Eigen::Index off = 0;
  Tensor<T> wx = reshape(segment(params, off, n * 4 * h), n, 4 * h);
  off += n * 4 * h;
  Tensor<T> wh = reshape(segment(params, off, h * 4 * h), h, 4 * h);
  off += h * 4 * h;
  Tensor<T> b = reshape(segment(params, off, 4 * h), 1, 4 * h);
  off += 4 * h;
  Tensor<T> head_w = reshape(segment(params, off, h), h, 1);
  off += h;
  Tensor<T> head_b = reshape(segment(params, off, 1), 1, 1);

  Tensor<T> gates = add_rowvec(v * wx + state.h * wh, b);
  Tensor<T> in_gate = sigmoid(columns(gates, 0, h));
  Tensor<T> forget_gate = sigmoid(columns(gates, h, h));
  Tensor<T> candidate = tanh_fn(columns(gates, 2 * h, h));
  Tensor<T> out_gate = sigmoid(columns(gates, 3 * h, h));

  Tensor<T> c_new = cmul(forget_gate, state.c) + cmul(in_gate, candidate);
  Tensor<T> h_new = cmul(out_gate, tanh_fn(c_new));
  Tensor<T> out = add_rowvec(h_new * head_w, head_b);
  return {out, {h_new, c_new}};
}

}  // namespace nfr
