#include "hiercon/pairing.hpp"

#include "hiercon/error.hpp"

namespace hiercon {

std::string to_string(StrategyName s) {
  switch (s) {
  case StrategyName::ours: return "ours";
  case StrategyName::method1: return "method1";
  case StrategyName::method2: return "method2";
  case StrategyName::method3: return "method3";
  case StrategyName::method4: return "method4";
  }
  return "ours";
}

StrategyName parse_strategy(std::string_view s) {
  if (s == "ours") return StrategyName::ours;
  if (s == "method1") return StrategyName::method1;
  if (s == "method2") return StrategyName::method2;
  if (s == "method3") return StrategyName::method3;
  if (s == "method4") return StrategyName::method4;
  throw UsageError("unknown pairing strategy '" + std::string(s) + "'");
}

Strategy Strategy::defaults(StrategyName name) {
  switch (name) {
  case StrategyName::method3: return {name, 1.0, 1.0, 1.6};
  case StrategyName::method4: return {name, 1.0, 1.0, 1.3};
  default: return {name, 1.6, 1.0, 1.0};
  }
}

namespace {

bool same_level2(const SenseLabel& a, const SenseLabel& b) { return a.l1 == b.l1 && a.l2 == b.l2; }

bool coarse_positives(StrategyName n) {
  return n == StrategyName::method3 || n == StrategyName::method4;
}

bool is_positive(const SenseLabel& anchor, const SenseLabel& other, StrategyName n) {
  return coarse_positives(n) ? anchor.l1 == other.l1 : anchor.terminal == other.terminal;
}

bool is_negative(const SenseLabel& anchor, const SenseLabel& other, StrategyName n) {
  switch (n) {
  case StrategyName::ours: return anchor.l1 == other.l1 && anchor.terminal != other.terminal;
  case StrategyName::method2: return !same_level2(anchor, other);
  default: return anchor.l1 != other.l1;
  }
}

double positive_weight(const SenseLabel& anchor, const SenseLabel& other, const Strategy& s) {
  switch (s.name) {
  case StrategyName::method3:
    return same_level2(anchor, other) ? s.coarse_pos_weight : s.pos_weight;
  case StrategyName::method4:
    return anchor.terminal == other.terminal ? s.coarse_pos_weight : s.pos_weight;
  default: return s.pos_weight;
  }
}

void check_anchor(int anchor, std::span<const SenseLabel> labels) {
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= labels.size())
    throw UsageError("anchor index out of range");
}

} // namespace

std::vector<int> select_positives(int anchor, std::span<const SenseLabel> labels,
                                  const Strategy& s) {
  check_anchor(anchor, labels);
  std::vector<int> out;
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (static_cast<int>(j) != anchor && is_positive(labels[anchor], labels[j], s.name))
      out.push_back(static_cast<int>(j));
  return out;
}

std::vector<int> select_negatives(int anchor, std::span<const SenseLabel> labels,
                                  const Strategy& s) {
  check_anchor(anchor, labels);
  std::vector<int> out;
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (static_cast<int>(j) != anchor && is_negative(labels[anchor], labels[j], s.name))
      out.push_back(static_cast<int>(j));
  return out;
}

PairSelection build_pair_selection(std::span<const SenseLabel> labels, const Strategy& s) {
  if (labels.size() < 2) throw UsageError("build_pair_selection needs at least two rows");
  if (!(s.pos_weight > 0.0) || !(s.neg_weight > 0.0) || !(s.coarse_pos_weight > 0.0))
    throw UsageError("pairing weights must be positive");
  PairSelection sel;
  sel.anchors.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    AnchorPairs& a = sel.anchors[i];
    a.positives = select_positives(static_cast<int>(i), labels, s);
    a.negatives = select_negatives(static_cast<int>(i), labels, s);
    for (int j : a.positives) a.positive_weights.push_back(positive_weight(labels[i], labels[j], s));
    a.negative_weights.assign(a.negatives.size(), s.neg_weight);
  }
  return sel;
}

} // namespace hiercon
