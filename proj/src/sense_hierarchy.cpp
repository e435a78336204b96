#include "hiercon/sense_hierarchy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "builtin_hierarchies.hpp"
#include "hiercon/error.hpp"

namespace hiercon {

using nlohmann::json;

std::string to_string(HierarchyVersion v) {
  return v == HierarchyVersion::pdtb2 ? "pdtb2" : "pdtb3";
}

HierarchyVersion parse_version(std::string_view s) {
  if (s == "pdtb2") return HierarchyVersion::pdtb2;
  if (s == "pdtb3") return HierarchyVersion::pdtb3;
  throw ValidationError("unknown hierarchy version '" + std::string(s) + "'");
}

namespace {

std::string join_path(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

SenseNode parse_node(const json& j, int level, const std::string& parent_path) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw ValidationError("node under '" + (parent_path.empty() ? "<root>" : parent_path) +
                          "' has no name");
  SenseNode node;
  node.name = j["name"].get<std::string>();
  node.level = level;
  const std::string path = join_path(parent_path, node.name);
  if (node.name.empty() || node.name.find('.') != std::string::npos)
    throw ValidationError("invalid sense name at '" + path + "'");
  if (level > 3) throw ValidationError("hierarchy deeper than 3 levels at '" + path + "'");

  if (level == 2) {
    if (!j.contains("symmetric") || !j["symmetric"].is_boolean())
      throw ValidationError("level-2 node '" + path + "' lacks a symmetric flag");
    node.symmetric = j["symmetric"].get<bool>();
  }

  if (j.contains("children")) {
    if (!j["children"].is_array())
      throw ValidationError("children of '" + path + "' is not a list");
    std::set<std::string> seen;
    for (const auto& child : j["children"]) {
      node.children.push_back(parse_node(child, level + 1, path));
      if (!seen.insert(node.children.back().name).second)
        throw ValidationError("duplicate sibling '" + node.children.back().name + "' under '" +
                              path + "'");
    }
  } else if (level < 3) {
    throw ValidationError("node '" + path + "' does not declare children");
  }

  if (level == 1 && node.children.empty())
    throw ValidationError("level-1 node '" + path + "' has no level-2 children");
  if (level == 2 && node.symmetric && !node.children.empty())
    throw ValidationError("symmetric node '" + path + "' has children");
  if (level == 2 && !node.symmetric && node.children.empty())
    throw ValidationError("asymmetric node '" + path + "' has no level-3 children");
  return node;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ValidationError(std::string("classification_labels.") + key + " missing");
  std::vector<std::string> out;
  for (const auto& s : j[key]) {
    if (!s.is_string())
      throw ValidationError(std::string("classification_labels.") + key + " holds a non-string");
    out.push_back(s.get<std::string>());
  }
  return out;
}

int index_of(const std::vector<std::string>& v, std::string_view s) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == s) return static_cast<int>(i);
  return -1;
}

} // namespace

int SenseHierarchy::level1_index(std::string_view l1) const { return index_of(level1_classes_, l1); }

int SenseHierarchy::level2_index(std::string_view l1_dot_l2) const {
  return index_of(level2_classes_, l1_dot_l2);
}

const SenseNode* SenseHierarchy::find(std::string_view dotted) const {
  const std::vector<SenseNode>* level = &roots_;
  const SenseNode* found = nullptr;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string_view part =
        dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    found = nullptr;
    for (const auto& n : *level)
      if (n.name == part) found = &n;
    if (found == nullptr) return nullptr;
    if (dot == std::string_view::npos) return found;
    level = &found->children;
    start = dot + 1;
  }
  return nullptr;
}

SenseHierarchy load_hierarchy(std::string_view document, HierarchyVersion version) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("hierarchy document does not parse: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("hierarchy document is not an object");
  if (!doc.contains("version") || !doc["version"].is_string())
    throw ValidationError("hierarchy document lacks a version");
  if (parse_version(doc["version"].get<std::string>()) != version)
    throw ValidationError("hierarchy document declares version '" +
                          doc["version"].get<std::string>() + "', expected '" +
                          to_string(version) + "'");
  if (!doc.contains("senses") || !doc["senses"].is_array())
    throw ValidationError("hierarchy document lacks a senses list");

  SenseHierarchy h;
  h.version_ = version;
  std::set<std::string> seen;
  for (const auto& root : doc["senses"]) {
    h.roots_.push_back(parse_node(root, 1, ""));
    if (!seen.insert(h.roots_.back().name).second)
      throw ValidationError("duplicate sibling '" + h.roots_.back().name + "' at <root>");
  }
  if (h.roots_.empty()) throw ValidationError("hierarchy has no level-1 senses");

  for (const auto& n1 : h.roots_) {
    for (const auto& n2 : n1.children) {
      auto add = [&](std::optional<std::string> l3) {
        SenseLabel label{version, n1.name, n2.name, l3, n1.name + "." + n2.name};
        if (l3) label.terminal += "." + *l3;
        h.terminals_.push_back(label.terminal);
        h.label_index_.emplace(label.terminal, std::move(label));
      };
      if (n2.children.empty()) add(std::nullopt);
      for (const auto& n3 : n2.children) add(n3.name);
    }
  }

  if (!doc.contains("classification_labels") || !doc["classification_labels"].is_object())
    throw ValidationError("hierarchy document lacks classification_labels");
  const auto& cls = doc["classification_labels"];
  h.level1_classes_ = string_list(cls, "level1");
  h.level2_classes_ = string_list(cls, "level2");
  for (const auto& l1 : h.level1_classes_) {
    const SenseNode* n = h.find(l1);
    if (n == nullptr || n->level != 1)
      throw ValidationError("classification label '" + l1 + "' is not a level-1 sense");
  }
  for (const auto& l2 : h.level2_classes_) {
    const SenseNode* n = h.find(l2);
    if (n == nullptr || n->level != 2)
      throw ValidationError("classification label '" + l2 + "' is not a level-2 sense");
  }
  return h;
}

std::string_view builtin_hierarchy_document(HierarchyVersion version) {
  return version == HierarchyVersion::pdtb2 ? detail::kPdtb2Document : detail::kPdtb3Document;
}

const SenseHierarchy& builtin_hierarchy(HierarchyVersion version) {
  static const SenseHierarchy pdtb2 =
      load_hierarchy(detail::kPdtb2Document, HierarchyVersion::pdtb2);
  static const SenseHierarchy pdtb3 =
      load_hierarchy(detail::kPdtb3Document, HierarchyVersion::pdtb3);
  return version == HierarchyVersion::pdtb2 ? pdtb2 : pdtb3;
}

SenseHierarchy hierarchy_from_arg(const std::string& name_or_path) {
  if (name_or_path == "pdtb2" || name_or_path == "pdtb3")
    return builtin_hierarchy(parse_version(name_or_path));
  std::ifstream in(name_or_path);
  if (!in) throw LookupError("cannot open hierarchy file '" + name_or_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("hierarchy file '" + name_or_path + "' does not parse: " + e.what());
  }
  if (!doc.contains("version") || !doc["version"].is_string())
    throw ValidationError("hierarchy file '" + name_or_path + "' lacks a version");
  return load_hierarchy(text, parse_version(doc["version"].get<std::string>()));
}

SenseLabel resolve_terminal(std::string_view raw_label, const SenseHierarchy& h) {
  const auto it = h.label_index().find(std::string(raw_label));
  if (it != h.label_index().end()) return it->second;
  const SenseNode* node = h.find(raw_label);
  if (node == nullptr)
    throw LookupError("unknown sense '" + std::string(raw_label) + "' in " +
                      to_string(h.version()));
  throw ValidationError("non-terminal label '" + std::string(raw_label) + "'");
}

bool are_sisters(const SenseLabel& a, const SenseLabel& b) {
  if (a.version != b.version)
    throw UsageError("are_sisters: labels come from different hierarchy versions");
  return a.l1 == b.l1 && a.terminal != b.terminal;
}

} // namespace hiercon
