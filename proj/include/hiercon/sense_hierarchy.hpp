#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hiercon {

enum class HierarchyVersion { pdtb2, pdtb3 };

std::string to_string(HierarchyVersion v);
HierarchyVersion parse_version(std::string_view s);

struct SenseNode {
  std::string name;
  int level = 1;
  bool symmetric = false;
  std::vector<SenseNode> children;
};

/// A resolved annotation label. `terminal` is the full dotted path of the
/// deepest populated level, which is the unit of positive-pair identity.
struct SenseLabel {
  HierarchyVersion version = HierarchyVersion::pdtb3;
  std::string l1;
  std::string l2;
  std::optional<std::string> l3;
  std::string terminal;

  /// "l1.l2", the level-2 classification label.
  std::string level2() const { return l1 + "." + l2; }

  friend bool operator==(const SenseLabel&, const SenseLabel&) = default;
};

class SenseHierarchy {
public:
  HierarchyVersion version() const { return version_; }
  const std::vector<SenseNode>& roots() const { return roots_; }

  /// Every annotatable terminal path, in tree order.
  const std::vector<std::string>& terminals() const { return terminals_; }
  const std::map<std::string, SenseLabel>& label_index() const { return label_index_; }

  /// Classifier output spaces (allow-lists), in file order.
  const std::vector<std::string>& level1_classes() const { return level1_classes_; }
  const std::vector<std::string>& level2_classes() const { return level2_classes_; }

  /// Index into level1_classes()/level2_classes(), or -1 when excluded.
  int level1_index(std::string_view l1) const;
  int level2_index(std::string_view l1_dot_l2) const;

  /// Finds a node by dotted path; nullptr when absent.
  const SenseNode* find(std::string_view dotted) const;

  friend SenseHierarchy load_hierarchy(std::string_view document, HierarchyVersion version);

private:
  HierarchyVersion version_ = HierarchyVersion::pdtb3;
  std::vector<SenseNode> roots_;
  std::vector<std::string> terminals_;
  std::map<std::string, SenseLabel> label_index_;
  std::vector<std::string> level1_classes_;
  std::vector<std::string> level2_classes_;
};

/// Parses and validates a hierarchy document. Throws ValidationError naming
/// the offending path on any structural violation, or when the document's
/// declared version differs from `version`.
SenseHierarchy load_hierarchy(std::string_view document, HierarchyVersion version);

/// Loads one of the two hierarchies compiled into the library.
const SenseHierarchy& builtin_hierarchy(HierarchyVersion version);
std::string_view builtin_hierarchy_document(HierarchyVersion version);

/// Loads from "pdtb2", "pdtb3", or a path to a hierarchy file.
SenseHierarchy hierarchy_from_arg(const std::string& name_or_path);

/// Splits a dotted label and checks it names a terminal of `h`.
/// Throws LookupError for unknown paths and ValidationError for a path that
/// stops at an asymmetric level-2 node.
SenseLabel resolve_terminal(std::string_view raw_label, const SenseHierarchy& h);

/// Same level-1 sense, different terminal. Throws UsageError across versions.
bool are_sisters(const SenseLabel& a, const SenseLabel& b);

} // namespace hiercon
