#include "hiercon/losses.hpp"

namespace hiercon {

LossBreakdown combined_loss(const MatrixXd& l1_logits, const MatrixXd& l2_logits,
                            std::span<const int> gold_l1, std::span<const int> gold_l2,
                            double scl, double beta) {
  if (!(beta >= 0.0)) throw UsageError("combined_loss: beta must be non-negative");
  LossBreakdown b;
  b.ce_l1 = cross_entropy(l1_logits, gold_l1);
  b.ce_l2 = cross_entropy(l2_logits, gold_l2);
  b.scl = scl;
  b.beta = beta;
  b.total = b.ce_l1 + b.ce_l2 + beta * scl;
  return b;
}

} // namespace hiercon
