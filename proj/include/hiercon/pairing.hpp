#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hiercon/sense_hierarchy.hpp"

namespace hiercon {

enum class StrategyName { ours, method1, method2, method3, method4 };

std::string to_string(StrategyName s);
/// Throws UsageError for names outside {ours, method1..method4}.
StrategyName parse_strategy(std::string_view s);

/// How positives and negatives are drawn from the sense hierarchy.
///
/// ours     positives share the terminal; negatives are same-level-1 sisters.
/// method1  positives share the terminal; negatives have another level-1.
/// method2  positives share the terminal; negatives have another level-2.
/// method3  every same-level-1 row is positive, same-level-2 rows weighted
///          `coarse_pos_weight`; negatives have another level-1.
/// method4  as method3, but the heavier weight goes to same-terminal rows.
struct Strategy {
  StrategyName name = StrategyName::ours;
  double pos_weight = 1.6;
  double neg_weight = 1.0;
  double coarse_pos_weight = 1.0;

  /// Weights used in the reported experiments for each strategy.
  static Strategy defaults(StrategyName name);
};

/// Positives/negatives of one anchor; weights are aligned with the indices.
struct AnchorPairs {
  std::vector<int> positives;
  std::vector<int> negatives;
  std::vector<double> positive_weights;
  std::vector<double> negative_weights;
};

struct PairSelection {
  std::vector<AnchorPairs> anchors;

  std::size_t size() const { return anchors.size(); }
  const AnchorPairs& operator[](std::size_t i) const { return anchors[i]; }
};

std::vector<int> select_positives(int anchor, std::span<const SenseLabel> labels,
                                  const Strategy& s = {});
std::vector<int> select_negatives(int anchor, std::span<const SenseLabel> labels,
                                  const Strategy& s);

/// Throws UsageError when fewer than two labels are given or a weight is not positive.
PairSelection build_pair_selection(std::span<const SenseLabel> labels, const Strategy& s);

} // namespace hiercon
