#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nfr/errors.hpp"

namespace nfr {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

namespace detail {

template <typename T>
struct Node {
  Mat<T> value;
  Mat<T> grad;  // empty until something accumulates into it
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this->grad into the parents' grads.
  std::function<void(const Node&)> backprop;
  const char* op = "leaf";
  std::string name;
  bool requires_grad = false;

  bool is_leaf() const { return parents.empty() && requires_grad; }
};

template <typename T>
void accumulate(Node<T>& n, const Mat<T>& g) {
  if (n.grad.size() == 0) {
    n.grad = Mat<T>::Zero(n.value.rows(), n.value.cols());
  }
  n.grad += g;
}

template <typename T>
inline void check_finite(const char* op, const Mat<T>& m) {
  if (!m.allFinite()) {
    throw NumericalError(std::string("non-finite values produced by op '") +
                         op + "'");
  }
}

}  // namespace detail

// Reverse-mode autodiff handle over a dense Eigen matrix. Tensors are cheap
// shared handles into the expression graph; building an expression records
// the backward closure, backward() replays them in reverse topological
// order. Values are (rows = batch, cols = features) throughout.
template <typename T>
class Tensor {
 public:
  using NodeT = detail::Node<T>;

  Tensor() = default;

  static Tensor constant(Mat<T> value, const char* op = "constant") {
    Tensor t;
    t.node_ = std::make_shared<NodeT>();
    t.node_->value = std::move(value);
    t.node_->op = op;
    t.node_->requires_grad = false;
    detail::check_finite(op, t.node_->value);
    return t;
  }

  static Tensor parameter(Mat<T> value, std::string name = "") {
    Tensor t;
    t.node_ = std::make_shared<NodeT>();
    t.node_->value = std::move(value);
    t.node_->op = "parameter";
    t.node_->name = std::move(name);
    t.node_->requires_grad = true;
    detail::check_finite("parameter", t.node_->value);
    return t;
  }

  static Tensor scalar(T v) {
    Mat<T> m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m), "scalar");
  }

  bool valid() const { return node_ != nullptr; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  Eigen::Index size() const { return node_->value.size(); }

  const Mat<T>& value() const { return node_->value; }
  // In-place mutation of a leaf's values (optimizer updates). Any expression
  // graph built from the old values is stale afterwards by design.
  Mat<T>& mutable_value() { return node_->value; }

  bool requires_grad() const { return node_->requires_grad; }
  const std::string& name() const { return node_->name; }
  const char* op() const { return node_->op; }

  bool has_grad() const { return node_->grad.size() != 0; }
  // Gradient accumulated by backward(); zeros if nothing reached this node.
  Mat<T> grad() const {
    if (!has_grad()) return Mat<T>::Zero(rows(), cols());
    return node_->grad;
  }
  void zero_grad() { node_->grad.resize(0, 0); }

  // Same value, detached from the graph: no gradients flow through.
  Tensor detach() const {
    return constant(node_->value, "detach");
  }

  std::shared_ptr<NodeT> node() const { return node_; }

  static Tensor from_node(std::shared_ptr<NodeT> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
  }

 private:
  std::shared_ptr<NodeT> node_;
};

namespace detail {

template <typename T, typename Backward>
Tensor<T> make_op(const char* op, Mat<T> value,
                  std::vector<std::shared_ptr<Node<T>>> parents,
                  Backward&& backward) {
  check_finite(op, value);
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->op = op;
  n->parents = std::move(parents);
  n->requires_grad =
      std::any_of(n->parents.begin(), n->parents.end(),
                  [](const auto& p) { return p->requires_grad; });
  if (n->requires_grad) {
    n->backprop = std::forward<Backward>(backward);
  }
  return Tensor<T>::from_node(std::move(n));
}

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a,
                        const Tensor<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(op) + ": shape mismatch (" +
                      std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise and linear-algebra ops
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("add", a, b);
  auto pa = a.node();
  auto pb = b.node();
  return detail::make_op<T>(
      "add", a.value() + b.value(), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad) detail::accumulate(*pa, n.grad);
        if (pb->requires_grad) detail::accumulate(*pb, n.grad);
      });
}

template <typename T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("sub", a, b);
  auto pa = a.node();
  auto pb = b.node();
  return detail::make_op<T>(
      "sub", a.value() - b.value(), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad) detail::accumulate(*pa, n.grad);
        if (pb->requires_grad) detail::accumulate(*pb, Mat<T>(-n.grad));
      });
}

// Matrix product (Eigen's operator* convention).
template <typename T>
Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.cols() != b.rows()) {
    throw ConfigError("matmul: inner dimensions disagree (" +
                      std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + ")");
  }
  auto pa = a.node();
  auto pb = b.node();
  return detail::make_op<T>(
      "matmul", a.value() * b.value(), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad)
          detail::accumulate(*pa, Mat<T>(n.grad * pb->value.transpose()));
        if (pb->requires_grad)
          detail::accumulate(*pb, Mat<T>(pa->value.transpose() * n.grad));
      });
}

// Hadamard product.
template <typename T>
Tensor<T> cmul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("cmul", a, b);
  auto pa = a.node();
  auto pb = b.node();
  return detail::make_op<T>(
      "cmul", a.value().cwiseProduct(b.value()), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad)
          detail::accumulate(*pa, Mat<T>(n.grad.cwiseProduct(pb->value)));
        if (pb->requires_grad)
          detail::accumulate(*pb, Mat<T>(n.grad.cwiseProduct(pa->value)));
      });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  auto pa = a.node();
  return detail::make_op<T>(
      "scale", Mat<T>(a.value() * s), {pa},
      [pa, s](const detail::Node<T>& n) {
        detail::accumulate(*pa, Mat<T>(n.grad * s));
      });
}

template <typename T>
Tensor<T> operator-(const Tensor<T>& a) {
  return scale(a, T(-1));
}

// Broadcast a 1 x n row vector over every row of a.
template <typename T>
Tensor<T> add_rowvec(const Tensor<T>& a, const Tensor<T>& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ConfigError("add_rowvec: expected 1x" + std::to_string(a.cols()) +
                      ", got " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
  auto pa = a.node();
  auto pb = b.node();
  Mat<T> out = a.value();
  out.rowwise() += b.value().row(0);
  return detail::make_op<T>(
      "add_rowvec", std::move(out), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad) detail::accumulate(*pa, n.grad);
        if (pb->requires_grad)
          detail::accumulate(*pb, Mat<T>(n.grad.colwise().sum()));
      });
}

template <typename T>
Tensor<T> mul_rowvec(const Tensor<T>& a, const Tensor<T>& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ConfigError("mul_rowvec: expected 1x" + std::to_string(a.cols()) +
                      ", got " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
  auto pa = a.node();
  auto pb = b.node();
  Mat<T> out = a.value().array().rowwise() * b.value().row(0).array();
  return detail::make_op<T>(
      "mul_rowvec", std::move(out), {pa, pb},
      [pa, pb](const detail::Node<T>& n) {
        if (pa->requires_grad) {
          Mat<T> g = n.grad.array().rowwise() * pb->value.row(0).array();
          detail::accumulate(*pa, g);
        }
        if (pb->requires_grad) {
          Mat<T> g = (n.grad.cwiseProduct(pa->value)).colwise().sum();
          detail::accumulate(*pb, g);
        }
      });
}

// Scale row i of a by the scalar s(i, 0); s is batch x 1.
template <typename T>
Tensor<T> scale_rows(const Tensor<T>& a, const Tensor<T>& s) {
  if (s.cols() != 1 || s.rows() != a.rows()) {
    throw ConfigError("scale_rows: expected " + std::to_string(a.rows()) +
                      "x1, got " + std::to_string(s.rows()) + "x" +
                      std::to_string(s.cols()));
  }
  auto pa = a.node();
  auto ps = s.node();
  Mat<T> out = a.value().array().colwise() * s.value().col(0).array();
  return detail::make_op<T>(
      "scale_rows", std::move(out), {pa, ps},
      [pa, ps](const detail::Node<T>& n) {
        if (pa->requires_grad) {
          Mat<T> g = n.grad.array().colwise() * ps->value.col(0).array();
          detail::accumulate(*pa, g);
        }
        if (ps->requires_grad) {
          Mat<T> g = (n.grad.cwiseProduct(pa->value)).rowwise().sum();
          detail::accumulate(*ps, g);
        }
      });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  auto pa = a.node();
  return detail::make_op<T>(
      "relu", Mat<T>(a.value().cwiseMax(T(0))), {pa},
      [pa](const detail::Node<T>& n) {
        Mat<T> g = (pa->value.array() > T(0))
                       .select(n.grad.array(), T(0))
                       .matrix();
        detail::accumulate(*pa, g);
      });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  auto pa = a.node();
  // exp(-|x|) form never overflows.
  Mat<T> out = a.value().unaryExpr([](T x) {
    if (x >= T(0)) {
      T e = std::exp(-x);
      return T(1) / (T(1) + e);
    }
    T e = std::exp(x);
    return e / (T(1) + e);
  });
  return detail::make_op<T>(
      "sigmoid", std::move(out), {pa},
      [pa, out_v = out](const detail::Node<T>& n) {
        Mat<T> g = n.grad.array() * out_v.array() * (T(1) - out_v.array());
        detail::accumulate(*pa, g);
      });
}

template <typename T>
Tensor<T> tanh_fn(const Tensor<T>& a) {
  auto pa = a.node();
  Mat<T> out = a.value().array().tanh();
  return detail::make_op<T>(
      "tanh", std::move(out), {pa},
      [pa, out_v = out](const detail::Node<T>& n) {
        Mat<T> g = n.grad.array() * (T(1) - out_v.array().square());
        detail::accumulate(*pa, g);
      });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
  auto pa = a.node();
  return detail::make_op<T>(
      "square", Mat<T>(a.value().array().square()), {pa},
      [pa](const detail::Node<T>& n) {
        Mat<T> g = T(2) * n.grad.cwiseProduct(pa->value);
        detail::accumulate(*pa, g);
      });
}

// min(x, 0) elementwise; gradient is passed only where x < 0.
template <typename T>
Tensor<T> min_zero(const Tensor<T>& a) {
  auto pa = a.node();
  return detail::make_op<T>(
      "min_zero", Mat<T>(a.value().cwiseMin(T(0))), {pa},
      [pa](const detail::Node<T>& n) {
        Mat<T> g = (pa->value.array() < T(0))
                       .select(n.grad.array(), T(0))
                       .matrix();
        detail::accumulate(*pa, g);
      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  auto pa = a.node();
  Mat<T> out(1, 1);
  out(0, 0) = a.value().sum();
  return detail::make_op<T>(
      "sum", std::move(out), {pa},
      [pa](const detail::Node<T>& n) {
        Mat<T> g = Mat<T>::Constant(pa->value.rows(), pa->value.cols(),
                                    n.grad(0, 0));
        detail::accumulate(*pa, g);
      });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  auto pa = a.node();
  Mat<T> out(1, 1);
  out(0, 0) = a.value().mean();
  T inv_n = T(1) / static_cast<T>(a.size());
  return detail::make_op<T>(
      "mean", std::move(out), {pa},
      [pa, inv_n](const detail::Node<T>& n) {
        Mat<T> g = Mat<T>::Constant(pa->value.rows(), pa->value.cols(),
                                    n.grad(0, 0) * inv_n);
        detail::accumulate(*pa, g);
      });
}

// Rows (off .. off+len) of a column vector.
template <typename T>
Tensor<T> segment(const Tensor<T>& v, Eigen::Index off, Eigen::Index len) {
  if (v.cols() != 1 || off < 0 || len < 0 || off + len > v.rows()) {
    throw ConfigError("segment: range [" + std::to_string(off) + ", " +
                      std::to_string(off + len) + ") out of bounds for " +
                      std::to_string(v.rows()) + "x" +
                      std::to_string(v.cols()));
  }
  auto pv = v.node();
  return detail::make_op<T>(
      "segment", Mat<T>(v.value().block(off, 0, len, 1)), {pv},
      [pv, off, len](const detail::Node<T>& n) {
        if (pv->grad.size() == 0) {
          pv->grad = Mat<T>::Zero(pv->value.rows(), pv->value.cols());
        }
        pv->grad.block(off, 0, len, 1) += n.grad;
      });
}

// Column block [c0 .. c0+n).
template <typename T>
Tensor<T> columns(const Tensor<T>& a, Eigen::Index c0, Eigen::Index n) {
  if (c0 < 0 || n < 0 || c0 + n > a.cols()) {
    throw ConfigError("columns: range out of bounds");
  }
  auto pa = a.node();
  return detail::make_op<T>(
      "columns", Mat<T>(a.value().middleCols(c0, n)), {pa},
      [pa, c0, n](const detail::Node<T>& nd) {
        if (pa->grad.size() == 0) {
          pa->grad = Mat<T>::Zero(pa->value.rows(), pa->value.cols());
        }
        pa->grad.middleCols(c0, n) += nd.grad;
      });
}

// Column-major reinterpretation to rows x cols (element count preserved).
template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.size()) {
    throw ConfigError("reshape: cannot view " + std::to_string(a.size()) +
                      " elements as " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  auto pa = a.node();
  Mat<T> out = a.value().reshaped(rows, cols);
  return detail::make_op<T>(
      "reshape", std::move(out), {pa},
      [pa](const detail::Node<T>& n) {
        Mat<T> g = n.grad.reshaped(pa->value.rows(), pa->value.cols());
        detail::accumulate(*pa, g);
      });
}

// Per-row standardization (x - mean) / sqrt(var + eps); the layer-norm core.
template <typename T>
Tensor<T> row_standardize(const Tensor<T>& a, T eps = T(1e-5)) {
  auto pa = a.node();
  const Mat<T>& x = a.value();
  Eigen::Index n = x.cols();
  Vec<T> mu = x.rowwise().mean();
  Mat<T> centered = x.array().colwise() - mu.array();
  Vec<T> var = centered.array().square().rowwise().mean();
  Vec<T> inv_sigma = (var.array() + eps).rsqrt();
  Mat<T> out = centered.array().colwise() * inv_sigma.array();
  return detail::make_op<T>(
      "row_standardize", out, {pa},
      [pa, out, inv_sigma, n](const detail::Node<T>& nd) {
        // dx = (g - mean(g) - y * mean(g . y)) / sigma, per row
        Vec<T> g_mean = nd.grad.rowwise().mean();
        Vec<T> gy_mean = nd.grad.cwiseProduct(out).rowwise().mean();
        Mat<T> g = nd.grad.array().colwise() - g_mean.array();
        g.array() -= out.array().colwise() * gy_mean.array();
        g.array().colwise() *= inv_sigma.array();
        detail::accumulate(*pa, g);
      });
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

// Populates gradients of every parameter reachable from `loss` (a 1x1
// tensor). Leaf gradients accumulate across calls; interior gradients are
// reset per call, so backward(A); backward(B) equals backward(A + B) on the
// leaves. Use zero_grad() on leaves between optimizer steps.
template <typename T>
void backward(const Tensor<T>& loss) {
  if (!loss.valid() || loss.rows() != 1 || loss.cols() != 1) {
    throw UsageError("backward: loss must be a 1x1 tensor");
  }
  detail::check_finite("backward(loss)", loss.value());
  if (!loss.node()->requires_grad) return;

  using NodeT = detail::Node<T>;
  // Iterative post-order DFS; graph depth scales with march iterations and
  // layer count, so no recursion.
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> visited;
  std::vector<std::pair<NodeT*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    NodeT* node = stack.back().first;
    std::size_t idx = stack.back().second;
    if (idx < node->parents.size()) {
      stack.back().second++;
      NodeT* p = node->parents[idx].get();
      if (p->requires_grad && visited.insert(p).second) {
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (NodeT* n : order) {
    if (!n->is_leaf()) n->grad.resize(0, 0);
  }
  detail::accumulate(*loss.node(), Mat<T>::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT* n = *it;
    if (n->backprop && n->grad.size() != 0) {
      if (!n->grad.allFinite()) {
        throw NumericalError(
            std::string("non-finite gradient reaching op '") + n->op + "'");
      }
      n->backprop(*n);
    }
  }
}

}  // namespace nfr
