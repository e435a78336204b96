#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hiercon/corpus.hpp"
#include "hiercon/sense_hierarchy.hpp"

namespace hiercon {

enum class Level { l1, l2 };

std::string to_string(Level l);
Level parse_level(std::string_view s);

/// "Temporal.Asynchronous.Precedence" -> "Temporal" (l1) or "Temporal.Asynchronous" (l2).
std::string project_label(std::string_view label, Level level);

struct ClassScore {
  std::string label;
  double f1 = 0.0;
  int support = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct EvalReport {
  Level level = Level::l2;
  std::size_t count = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  /// One entry per class of the level's allow-list, in allow-list order.
  std::vector<ClassScore> classes;

  std::map<std::string, double> per_class_f1() const;
  std::map<std::string, int> support() const;
};

using Predictions = std::map<std::string, std::string>;
using GoldSets = std::map<std::string, std::vector<std::string>>;

/// Gold label sets at `level`, restricted to the level's allow-list. Examples
/// with no allowed gold label are left out. Keyed by rel_id.
GoldSets gold_sets(const std::vector<RelationExample>& examples, Level level,
                   const SenseHierarchy& h);

/// Match-any-gold scoring. A correct prediction is a true positive for its
/// class; a wrong one is a false negative for the first gold class and a
/// false positive for the predicted class. Throws LookupError listing
/// rel_ids without a prediction, ValidationError for labels outside the
/// allow-list.
EvalReport score(const Predictions& preds, const GoldSets& gold, Level level,
                 const SenseHierarchy& h);

/// Per-class F1 (percent, two decimals) grouped by level-1 parent.
std::string per_class_table(const EvalReport& report, const SenseHierarchy& h);

/// Machine-readable form: one JSON record per metric.
void write_report_records(std::ostream& out, const EvalReport& report,
                          std::string_view split = "");

/// Line-delimited {rel_id, level, label}.
void write_predictions(std::ostream& out, const Predictions& preds, Level level);
/// Reads records for `level` only; other levels are skipped.
Predictions read_predictions(std::istream& in, Level level);

} // namespace hiercon
