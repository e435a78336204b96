#include "hiercon/ablation.hpp"

#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hiercon/trainer.hpp"

namespace hiercon {

namespace {

AblationRow run_variant(const std::string& table, const std::string& variant,
                        const TrainConfig& cfg, const SplitSet& splits, const SenseHierarchy& h) {
  const TrainResult r = train(cfg, splits, h);
  const auto model = model_from_checkpoint(r.best, h);
  AblationRow row{table, variant};
  if (!splits.dev.empty()) {
    const Evaluation dev = evaluate(*model, splits.dev, h);
    row.dev_accuracy_l1 = dev.l1.accuracy;
    row.dev_macro_f1_l1 = dev.l1.macro_f1;
    row.dev_accuracy_l2 = dev.l2.accuracy;
    row.dev_macro_f1_l2 = dev.l2.macro_f1;
  }
  if (!splits.test.empty()) {
    const Evaluation test = evaluate(*model, splits.test, h);
    row.test_accuracy_l1 = test.l1.accuracy;
    row.test_macro_f1_l1 = test.l1.macro_f1;
    row.test_accuracy_l2 = test.l2.accuracy;
    row.test_macro_f1_l2 = test.l2.macro_f1;
  }
  return row;
}

} // namespace

std::vector<AblationRow> run_ablation(const TrainConfig& cfg, const SplitSet& splits,
                                      const SenseHierarchy& h, const AblationPlan& plan) {
  std::vector<AblationRow> rows;
  std::optional<AblationRow> ours;
  auto ours_row = [&](const std::string& table) {
    if (!ours) ours = run_variant(table, "ours", cfg, splits, h);
    AblationRow r = *ours;
    r.table = table;
    return r;
  };

  if (plan.strategies) {
    rows.push_back(ours_row("strategy"));
    for (auto name : {StrategyName::method1, StrategyName::method2, StrategyName::method3,
                      StrategyName::method4}) {
      TrainConfig c = cfg;
      c.strategy = Strategy::defaults(name);
      rows.push_back(run_variant("strategy", to_string(name), c, splits, h));
    }
  }
  if (plan.contrastive) {
    TrainConfig c = cfg;
    c.contrastive = false;
    c.beta = 0.0;
    rows.push_back(run_variant("contrastive", "mtl", c, splits, h));
    rows.push_back(ours_row("contrastive"));
  }
  if (plan.augmentation) {
    rows.push_back(ours_row("augmentation"));
    TrainConfig c = cfg;
    c.augmentation = false;
    rows.push_back(run_variant("augmentation", "-augmentation", c, splits, h));
  }
  return rows;
}

void write_ablation(std::ostream& out, const std::vector<AblationRow>& rows) {
  for (const auto& r : rows) {
    nlohmann::json j{{"table", r.table},
                     {"variant", r.variant},
                     {"dev_accuracy_l1", r.dev_accuracy_l1},
                     {"dev_macro_f1_l1", r.dev_macro_f1_l1},
                     {"dev_accuracy_l2", r.dev_accuracy_l2},
                     {"dev_macro_f1_l2", r.dev_macro_f1_l2},
                     {"test_accuracy_l1", r.test_accuracy_l1},
                     {"test_macro_f1_l1", r.test_macro_f1_l1},
                     {"test_accuracy_l2", r.test_accuracy_l2},
                     {"test_macro_f1_l2", r.test_macro_f1_l2}};
    out << j.dump() << '\n';
  }
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  std::string current;
  for (const auto& r : rows) {
    if (r.table != current) {
      current = r.table;
      out << "\n[" << current << "]\n"
          << std::left << std::setw(16) << "variant" << std::right << std::setw(10) << "L1 Acc"
          << std::setw(10) << "L1 F1" << std::setw(10) << "L2 Acc" << std::setw(10) << "L2 F1"
          << "   (test)\n";
    }
    out << std::left << std::setw(16) << r.variant << std::right << std::setw(10)
        << 100 * r.test_accuracy_l1 << std::setw(10) << 100 * r.test_macro_f1_l1 << std::setw(10)
        << 100 * r.test_accuracy_l2 << std::setw(10) << 100 * r.test_macro_f1_l2 << '\n';
  }
  return out.str();
}

} // namespace hiercon
