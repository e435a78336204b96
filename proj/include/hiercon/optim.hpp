#pragma once

#include <vector>

#include "hiercon/encoder.hpp"

namespace hiercon {

/// Global L2 norm over every parameter gradient.
double global_grad_norm(const std::vector<Parameter>& params);

/// Rescales all gradients so their global norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_global_norm(const std::vector<Parameter>& params, double max_norm);

class Adam {
public:
  struct Options {
    double learning_rate = 3e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  explicit Adam(Options opt) : opt_(opt) {}

  /// Parameters must be passed in the same order on every call.
  void step(const std::vector<Parameter>& params);
  long steps() const { return t_; }

private:
  Options opt_;
  long t_ = 0;
  std::vector<MatrixXd> m_, v_;
};

} // namespace hiercon
