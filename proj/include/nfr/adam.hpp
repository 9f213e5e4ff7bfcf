#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nfr/autodiff.hpp"

namespace nfr {

// Adam with bias correction. Parameters are leaf tensors registered once;
// registration order is the serialization order, so it must be
// deterministic.
template <typename T>
class AdamOptimizer {
 public:
  struct Hyper {
    T learning_rate = T(4e-4);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T epsilon = T(1e-8);
  };

  struct Slot {
    Mat<T> m;
    Mat<T> v;
  };

  AdamOptimizer() = default;
  explicit AdamOptimizer(Hyper hyper) : hyper_(hyper) {}

  void add_parameter(const Tensor<T>& p) {
    if (!p.requires_grad()) {
      throw UsageError("AdamOptimizer: '" + p.name() +
                       "' does not require gradients");
    }
    params_.push_back(p);
    slots_.push_back({Mat<T>::Zero(p.rows(), p.cols()),
                      Mat<T>::Zero(p.rows(), p.cols())});
  }

  void add_parameters(const std::vector<Tensor<T>>& ps) {
    for (const auto& p : ps) add_parameter(p);
  }

  std::int64_t step_count() const { return step_; }
  const Hyper& hyper() const { return hyper_; }
  void set_learning_rate(T lr) { hyper_.learning_rate = lr; }
  const std::vector<Tensor<T>>& parameters() const { return params_; }

  std::size_t slot_count() const { return slots_.size(); }
  Slot& slot(std::size_t i) { return slots_[i]; }
  void set_step_count(std::int64_t s) { step_ = s; }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  // One update over all registered parameters, reading their accumulated
  // gradients. Parameters without gradients this step still advance their
  // moment estimates (with g = 0), matching dense Adam semantics.
  void step() {
    ++step_;
    T bc1 = T(1) - std::pow(hyper_.beta1, static_cast<T>(step_));
    T bc2 = T(1) - std::pow(hyper_.beta2, static_cast<T>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Tensor<T>& p = params_[i];
      Mat<T> g = p.grad();
      if (!g.allFinite()) {
        throw NumericalError("AdamOptimizer: non-finite gradient on '" +
                             (p.name().empty() ? std::string("<unnamed>")
                                               : p.name()) +
                             "' at step " + std::to_string(step_));
      }
      Slot& s = slots_[i];
      s.m = hyper_.beta1 * s.m + (T(1) - hyper_.beta1) * g;
      s.v = (hyper_.beta2 * s.v.array() +
             (T(1) - hyper_.beta2) * g.array().square())
                .matrix();
      Mat<T> update =
          ((s.m.array() / bc1) /
           ((s.v.array() / bc2).sqrt() + hyper_.epsilon))
              .matrix();
      p.mutable_value() -= hyper_.learning_rate * update;
    }
  }

 private:
  Hyper hyper_;
  std::vector<Tensor<T>> params_;
  std::vector<Slot> slots_;
  std::int64_t step_ = 0;
};

}  // namespace nfr
