#include "hiercon/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hiercon/error.hpp"

namespace hiercon {

using nlohmann::json;

std::string to_string(Level l) { return l == Level::l1 ? "l1" : "l2"; }

Level parse_level(std::string_view s) {
  if (s == "l1" || s == "1") return Level::l1;
  if (s == "l2" || s == "2") return Level::l2;
  throw UsageError("unknown level '" + std::string(s) + "'");
}

std::string project_label(std::string_view label, Level level) {
  const std::size_t first = label.find('.');
  if (level == Level::l1) return std::string(label.substr(0, first));
  if (first == std::string_view::npos) return std::string(label);
  const std::size_t second = label.find('.', first + 1);
  return std::string(label.substr(0, second));
}

std::map<std::string, double> EvalReport::per_class_f1() const {
  std::map<std::string, double> out;
  for (const auto& c : classes) out[c.label] = c.f1;
  return out;
}

std::map<std::string, int> EvalReport::support() const {
  std::map<std::string, int> out;
  for (const auto& c : classes) out[c.label] = c.support;
  return out;
}

namespace {

const std::vector<std::string>& allow_list(const SenseHierarchy& h, Level level) {
  return level == Level::l1 ? h.level1_classes() : h.level2_classes();
}

} // namespace

GoldSets gold_sets(const std::vector<RelationExample>& examples, Level level,
                   const SenseHierarchy& h) {
  const auto& allowed = allow_list(h, level);
  GoldSets out;
  for (const auto& e : examples) {
    auto& set = out[e.rel_id];
    for (const auto& s : e.senses) {
      const std::string lab = project_label(s.terminal, level);
      if (std::find(allowed.begin(), allowed.end(), lab) == allowed.end()) continue;
      if (std::find(set.begin(), set.end(), lab) == set.end()) set.push_back(lab);
    }
    if (set.empty()) out.erase(e.rel_id);
  }
  return out;
}

EvalReport score(const Predictions& preds, const GoldSets& gold, Level level,
                 const SenseHierarchy& h) {
  const auto& allowed = allow_list(h, level);
  auto class_of = [&](const std::string& raw) {
    const std::string lab = project_label(raw, level);
    const auto it = std::find(allowed.begin(), allowed.end(), lab);
    if (it == allowed.end())
      throw ValidationError("label '" + raw + "' is outside the " + to_string(level) +
                            " label set");
    return static_cast<std::size_t>(it - allowed.begin());
  };

  std::vector<std::string> missing;
  for (const auto& [id, g] : gold)
    if (!preds.contains(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string msg = "missing predictions for:";
    for (const auto& id : missing) msg += " " + id;
    throw LookupError(msg);
  }

  EvalReport r;
  r.level = level;
  r.classes.resize(allowed.size());
  for (std::size_t c = 0; c < allowed.size(); ++c) r.classes[c].label = allowed[c];

  std::size_t correct = 0;
  for (const auto& [id, g] : gold) {
    if (g.empty()) throw ValidationError("empty gold set for '" + id + "'");
    const std::size_t p = class_of(preds.at(id));
    std::vector<std::size_t> gold_idx;
    for (const auto& lab : g) gold_idx.push_back(class_of(lab));
    if (std::find(gold_idx.begin(), gold_idx.end(), p) != gold_idx.end()) {
      ++correct;
      ++r.classes[p].tp;
    } else {
      ++r.classes[gold_idx.front()].fn;
      ++r.classes[p].fp;
    }
  }
  r.count = gold.size();
  r.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());

  double sum = 0.0;
  for (auto& c : r.classes) {
    c.support = c.tp + c.fn;
    const int denom = 2 * c.tp + c.fp + c.fn;
    c.f1 = denom == 0 ? 0.0 : 2.0 * c.tp / denom;
    sum += c.f1;
  }
  r.macro_f1 = r.classes.empty() ? 0.0 : sum / static_cast<double>(r.classes.size());
  return r;
}

std::string per_class_table(const EvalReport& report, const SenseHierarchy& h) {
  std::ostringstream out;
  std::size_t width = 5;
  for (const auto& c : report.classes) width = std::max(width, c.label.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "Label" << std::right
      << std::setw(8) << "F1" << std::setw(10) << "Support" << '\n';
  out << std::string(width + 20, '-') << '\n';
  for (const auto& root : h.roots()) {
    bool any = false;
    for (const auto& c : report.classes) {
      if (project_label(c.label, Level::l1) != root.name) continue;
      any = true;
      out << std::left << std::setw(static_cast<int>(width) + 2) << c.label << std::right
          << std::fixed << std::setprecision(2) << std::setw(8) << 100.0 * c.f1
          << std::setw(10) << c.support << '\n';
    }
    if (any && report.level == Level::l2) out << std::string(width + 20, '-') << '\n';
  }
  out << std::left << std::setw(static_cast<int>(width) + 2) << "Accuracy" << std::right
      << std::fixed << std::setprecision(2) << std::setw(8) << 100.0 * report.accuracy << '\n';
  out << std::left << std::setw(static_cast<int>(width) + 2) << "Macro-F1" << std::right
      << std::fixed << std::setprecision(2) << std::setw(8) << 100.0 * report.macro_f1 << '\n';
  return out.str();
}

void write_report_records(std::ostream& out, const EvalReport& report, std::string_view split) {
  auto base = [&]() {
    json j;
    if (!split.empty()) j["split"] = split;
    j["level"] = to_string(report.level);
    return j;
  };
  json acc = base();
  acc["metric"] = "accuracy";
  acc["value"] = report.accuracy;
  out << acc.dump() << '\n';
  json mf = base();
  mf["metric"] = "macro_f1";
  mf["value"] = report.macro_f1;
  out << mf.dump() << '\n';
  for (const auto& c : report.classes) {
    json j = base();
    j["metric"] = "f1";
    j["label"] = c.label;
    j["value"] = c.f1;
    j["support"] = c.support;
    out << j.dump() << '\n';
  }
}

void write_predictions(std::ostream& out, const Predictions& preds, Level level) {
  for (const auto& [id, label] : preds)
    out << json{{"rel_id", id}, {"level", to_string(level)}, {"label", label}}.dump() << '\n';
}

Predictions read_predictions(std::istream& in, Level level) {
  Predictions out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ValidationError("predictions line " + std::to_string(n) + " does not parse");
    }
    if (!j.contains("rel_id") || !j.contains("level") || !j.contains("label"))
      throw ValidationError("predictions line " + std::to_string(n) +
                            " needs rel_id, level and label");
    if (parse_level(j["level"].get<std::string>()) != level) continue;
    out[j["rel_id"].get<std::string>()] = j["label"].get<std::string>();
  }
  return out;
}

} // namespace hiercon
