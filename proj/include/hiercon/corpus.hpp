#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiercon/sense_hierarchy.hpp"

namespace hiercon {

enum class Provenance { original, augmented };

struct RelationExample {
  std::string rel_id;
  std::string arg1;
  std::string arg2;
  std::vector<SenseLabel> senses;
  std::vector<std::string> connectives;
  int section = 0;
  Provenance provenance = Provenance::original;
  std::optional<std::string> inserted_connective;

  friend bool operator==(const RelationExample&, const RelationExample&) = default;
};

struct Corpus {
  HierarchyVersion version = HierarchyVersion::pdtb3;
  std::vector<RelationExample> examples;
  const SenseHierarchy* hierarchy = nullptr;
};

/// A record that failed validation, with the raw line kept verbatim.
struct RejectedRecord {
  std::size_t line = 0;
  std::string raw;
  std::string reason;
};

struct IngestResult {
  Corpus corpus;
  std::vector<RejectedRecord> rejects;
};

/// Reads one JSON record per line. Malformed records end up in `rejects`;
/// blank lines are skipped. `h` must outlive the returned corpus.
IngestResult ingest(std::istream& records, const SenseHierarchy& h);

/// Validates a single parsed record; throws ValidationError/LookupError.
RelationExample parse_record(const std::string& line, const SenseHierarchy& h);

std::string serialize_record(const RelationExample& e);
void write_corpus(std::ostream& out, const std::vector<RelationExample>& examples);
void write_rejects(std::ostream& out, const std::vector<RejectedRecord>& rejects);

struct SplitSet {
  std::vector<RelationExample> train;
  std::vector<RelationExample> dev;
  std::vector<RelationExample> test;
  std::vector<std::string> warnings;
};

enum class Split { train, dev, test, none };

/// Train 2-20, dev 0-1, test 21-22; 23-24 belong to no split.
Split split_of_section(int section);
SplitSet split_sections(const Corpus& c);

/// Two-sense examples become adjacent single-sense copies sharing rel_id.
std::vector<RelationExample> expand_multilabel(const std::vector<RelationExample>& examples);

} // namespace hiercon
