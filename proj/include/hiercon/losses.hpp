#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercon/error.hpp"
#include "hiercon/pairing.hpp"

namespace hiercon {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

/// Gold index meaning "no class at this level"; the row is left out of the mean.
inline constexpr int kIgnoreClass = -1;

/// Mean negative log-softmax at the gold index over rows with a gold class.
/// When `grad` is given it receives d(loss)/d(logits).
template <typename Derived>
typename Derived::Scalar cross_entropy(const Eigen::MatrixBase<Derived>& logits,
                                       std::span<const int> gold,
                                       Mat<typename Derived::Scalar>* grad = nullptr) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  if (static_cast<std::size_t>(logits.rows()) != gold.size())
    throw UsageError("cross_entropy: logits rows and gold size differ");
  const Eigen::Index n = logits.rows();
  const Eigen::Index classes = logits.cols();
  if (grad) grad->setZero(n, classes);

  Eigen::Index counted = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (gold[i] != kIgnoreClass) ++counted;
  if (counted == 0) return Scalar(0);

  Scalar total(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = gold[i];
    if (g == kIgnoreClass) continue;
    if (g < 0 || g >= classes) throw UsageError("cross_entropy: gold index out of range");
    const Scalar m = logits.row(i).maxCoeff();
    Scalar z(0);
    for (Eigen::Index c = 0; c < classes; ++c) z += exp(logits(i, c) - m);
    const Scalar lse = m + log(z);
    total += lse - logits(i, g);
    if (grad) {
      for (Eigen::Index c = 0; c < classes; ++c)
        (*grad)(i, c) = exp(logits(i, c) - lse) / Scalar(counted);
      (*grad)(i, g) -= Scalar(1) / Scalar(counted);
    }
  }
  return total / Scalar(counted);
}

/// Unit-length rows; zero rows stay zero so their cosine with anything is 0.
template <typename Derived>
Mat<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& vectors,
                                             Vec<typename Derived::Scalar>* norms = nullptr) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> unit = vectors;
  Vec<Scalar> n = vectors.rowwise().norm();
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    if (n(i) > Scalar(0))
      unit.row(i) /= n(i);
    else
      unit.row(i).setZero();
  }
  if (norms) *norms = std::move(n);
  return unit;
}

template <typename Derived>
Mat<typename Derived::Scalar> cosine_similarity(const Eigen::MatrixBase<Derived>& vectors) {
  const auto unit = normalize_rows(vectors);
  return unit * unit.transpose();
}

/// Pulls d(loss)/d(similarity) back to d(loss)/d(vectors).
template <typename Scalar>
Mat<Scalar> cosine_backward(const Mat<Scalar>& vectors, const Mat<Scalar>& dsim) {
  Vec<Scalar> norms;
  const Mat<Scalar> unit = normalize_rows(vectors, &norms);
  const Mat<Scalar> dunit = (dsim + dsim.transpose()) * unit;
  Mat<Scalar> dvec = Mat<Scalar>::Zero(vectors.rows(), vectors.cols());
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    if (!(norms(i) > Scalar(0))) continue;
    const Scalar radial = dunit.row(i).dot(unit.row(i));
    dvec.row(i) = (dunit.row(i) - radial * unit.row(i)) / norms(i);
  }
  return dvec;
}

/// Weighted hierarchy contrastive loss over cosine similarities, summed over
/// anchors that have at least one positive. The denominator of each anchor
/// runs over its positives and negatives only.
template <typename Derived>
typename Derived::Scalar hier_contrastive(const Eigen::MatrixBase<Derived>& vectors,
                                          const PairSelection& sel,
                                          typename Derived::Scalar tau,
                                          Mat<typename Derived::Scalar>* grad = nullptr) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  if (!(tau > Scalar(0))) throw UsageError("hier_contrastive: temperature must be positive");
  if (static_cast<Eigen::Index>(sel.size()) != vectors.rows())
    throw UsageError("hier_contrastive: selection and batch sizes differ");

  const Mat<Scalar> h = vectors;
  const Mat<Scalar> sim = cosine_similarity(h);
  Mat<Scalar> dsim;
  if (grad) dsim.setZero(h.rows(), h.rows());

  Scalar loss(0);
  std::vector<Scalar> logits;
  std::vector<int> cand;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const AnchorPairs& a = sel[static_cast<std::size_t>(i)];
    if (a.positives.empty()) continue;
    logits.clear();
    cand.clear();
    // log(w_k) + sim/tau for every candidate; positives first.
    for (std::size_t p = 0; p < a.positives.size(); ++p) {
      cand.push_back(a.positives[p]);
      logits.push_back(log(Scalar(a.positive_weights[p])) + sim(i, a.positives[p]) / tau);
    }
    for (std::size_t q = 0; q < a.negatives.size(); ++q) {
      cand.push_back(a.negatives[q]);
      logits.push_back(log(Scalar(a.negative_weights[q])) + sim(i, a.negatives[q]) / tau);
    }
    Scalar m = logits[0];
    for (const auto& l : logits) m = l > m ? l : m;
    Scalar z(0);
    for (const auto& l : logits) z += exp(l - m);
    const Scalar lse = m + log(z);

    const Scalar inv_pos = Scalar(1) / Scalar(a.positives.size());
    Scalar term(0);
    for (std::size_t p = 0; p < a.positives.size(); ++p) term += logits[p] - lse;
    loss -= term * inv_pos;

    if (grad) {
      for (std::size_t c = 0; c < cand.size(); ++c) {
        Scalar g = exp(logits[c] - lse);
        if (c < a.positives.size()) g -= inv_pos;
        dsim(i, cand[c]) += g / tau;
      }
    }
  }
  if (grad) *grad = cosine_backward<Scalar>(h, dsim);
  return loss;
}

/// Standard supervised contrastive loss: same-terminal rows are positives,
/// every other row is in the denominator. Summed over anchors with positives.
template <typename Derived>
typename Derived::Scalar supcon_reference(const Eigen::MatrixBase<Derived>& vectors,
                                          std::span<const std::string> labels,
                                          typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  if (vectors.rows() < 2) throw UsageError("supcon_reference needs at least two rows");
  if (!(tau > Scalar(0))) throw UsageError("supcon_reference: temperature must be positive");
  if (static_cast<std::size_t>(vectors.rows()) != labels.size())
    throw UsageError("supcon_reference: labels and rows differ");
  const Mat<Scalar> sim = cosine_similarity(vectors);
  const Eigen::Index n = vectors.rows();
  Scalar loss(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar m = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != i) m = sim(i, k) / tau > m ? sim(i, k) / tau : m;
    Scalar z(0);
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != i) z += exp(sim(i, k) / tau - m);
    const Scalar lse = m + log(z);
    Scalar term(0);
    int positives = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      term += sim(i, j) / tau - lse;
      ++positives;
    }
    if (positives > 0) loss -= term / Scalar(positives);
  }
  return loss;
}

struct LossBreakdown {
  double ce_l1 = 0.0;
  double ce_l2 = 0.0;
  double scl = 0.0;
  double beta = 0.0;
  double total = 0.0;
};

/// ce_l1 + ce_l2 + beta * scl. Throws UsageError for negative beta.
LossBreakdown combined_loss(const MatrixXd& l1_logits, const MatrixXd& l2_logits,
                            std::span<const int> gold_l1, std::span<const int> gold_l2,
                            double scl, double beta);

} // namespace hiercon
