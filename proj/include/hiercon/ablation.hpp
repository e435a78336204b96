#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hiercon/config.hpp"
#include "hiercon/corpus.hpp"

namespace hiercon {

struct AblationPlan {
  /// ours against methods 1-4.
  bool strategies = true;
  /// ours against the multi-task baseline without the contrastive term.
  bool contrastive = true;
  /// ours against training without connective augmentation.
  bool augmentation = true;
};

struct AblationRow {
  std::string table;    // "strategy", "contrastive" or "augmentation"
  std::string variant;  // "ours", "method1".., "mtl", "-augmentation"
  double dev_accuracy_l1 = 0, dev_macro_f1_l1 = 0, dev_accuracy_l2 = 0, dev_macro_f1_l2 = 0;
  double test_accuracy_l1 = 0, test_macro_f1_l1 = 0, test_accuracy_l2 = 0, test_macro_f1_l2 = 0;
};

/// Trains every variant the plan asks for from `cfg` (the "ours" row uses
/// `cfg` as given) and scores the best-dev model on dev and test.
std::vector<AblationRow> run_ablation(const TrainConfig& cfg, const SplitSet& splits,
                                      const SenseHierarchy& h, const AblationPlan& plan);

void write_ablation(std::ostream& out, const std::vector<AblationRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);

} // namespace hiercon
