#include "hiercon/corpus.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "hiercon/error.hpp"

namespace hiercon {

using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ValidationError(std::string("missing field ") + key);
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ValidationError(std::string(key) + " holds a non-string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ValidationError(std::string("missing field ") + key);
  return j[key].get<std::string>();
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

RelationExample parse_record(const std::string& line, const SenseHierarchy& h) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw ValidationError("record does not parse");
  }
  if (!j.is_object()) throw ValidationError("record is not an object");

  RelationExample e;
  e.rel_id = required_string(j, "rel_id");
  if (e.rel_id.empty()) throw ValidationError("empty rel_id");
  e.arg1 = required_string(j, "arg1");
  e.arg2 = required_string(j, "arg2");
  if (blank(e.arg1)) throw ValidationError("empty arg1");
  if (blank(e.arg2)) throw ValidationError("empty arg2");

  if (!j.contains("section") || !j["section"].is_number_integer())
    throw ValidationError("missing field section");
  const auto section = j["section"].get<long long>();
  if (section < 0 || section > 24) throw ValidationError("section out of range");
  e.section = static_cast<int>(section);

  const auto senses = string_array(j, "senses");
  if (senses.empty()) throw ValidationError("no senses");
  if (senses.size() > 2) throw ValidationError("too many senses");
  for (const auto& s : senses) e.senses.push_back(resolve_terminal(s, h));

  e.connectives = string_array(j, "connectives");

  if (j.contains("provenance")) {
    const std::string p = required_string(j, "provenance");
    if (p == "augmented") {
      e.provenance = Provenance::augmented;
    } else if (p != "original") {
      throw ValidationError("unknown provenance '" + p + "'");
    }
  }
  if (j.contains("inserted_connective") && !j["inserted_connective"].is_null())
    e.inserted_connective = required_string(j, "inserted_connective");

  if (e.provenance == Provenance::original) {
    if (e.connectives.empty()) throw ValidationError("no connectives");
    if (e.connectives.size() > 2) throw ValidationError("too many connectives");
    if (e.inserted_connective) throw ValidationError("original record with inserted_connective");
  } else {
    if (!e.inserted_connective) throw ValidationError("augmented record lacks inserted_connective");
    if (e.senses.size() != 1) throw ValidationError("augmented record with multiple senses");
  }
  return e;
}

IngestResult ingest(std::istream& records, const SenseHierarchy& h) {
  IngestResult result;
  result.corpus.version = h.version();
  result.corpus.hierarchy = &h;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(records, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      result.corpus.examples.push_back(parse_record(line, h));
    } catch (const ValidationError& e) {
      result.rejects.push_back({line_no, line, e.what()});
    } catch (const LookupError& e) {
      result.rejects.push_back({line_no, line, e.what()});
    }
  }
  return result;
}

std::string serialize_record(const RelationExample& e) {
  json j;
  j["rel_id"] = e.rel_id;
  j["arg1"] = e.arg1;
  j["arg2"] = e.arg2;
  json senses = json::array();
  for (const auto& s : e.senses) senses.push_back(s.terminal);
  j["senses"] = senses;
  j["connectives"] = e.connectives;
  j["section"] = e.section;
  j["provenance"] = e.provenance == Provenance::original ? "original" : "augmented";
  if (e.inserted_connective) j["inserted_connective"] = *e.inserted_connective;
  return j.dump();
}

void write_corpus(std::ostream& out, const std::vector<RelationExample>& examples) {
  for (const auto& e : examples) out << serialize_record(e) << '\n';
}

void write_rejects(std::ostream& out, const std::vector<RejectedRecord>& rejects) {
  for (const auto& r : rejects) {
    json j;
    try {
      j = json::parse(r.raw);
      if (!j.is_object()) j = json{{"raw", r.raw}};
    } catch (const json::parse_error&) {
      j = json{{"raw", r.raw}};
    }
    j["line"] = r.line;
    j["reason"] = r.reason;
    out << j.dump() << '\n';
  }
}

Split split_of_section(int section) {
  if (section == 0 || section == 1) return Split::dev;
  if (section >= 2 && section <= 20) return Split::train;
  if (section == 21 || section == 22) return Split::test;
  return Split::none;
}

SplitSet split_sections(const Corpus& c) {
  SplitSet s;
  for (const auto& e : c.examples) {
    switch (split_of_section(e.section)) {
    case Split::train: s.train.push_back(e); break;
    case Split::dev: s.dev.push_back(e); break;
    case Split::test: s.test.push_back(e); break;
    case Split::none: break;
    }
  }
  if (s.train.empty()) s.warnings.emplace_back("train split is empty");
  if (s.dev.empty()) s.warnings.emplace_back("dev split is empty");
  if (s.test.empty()) s.warnings.emplace_back("test split is empty");
  return s;
}

std::vector<RelationExample> expand_multilabel(const std::vector<RelationExample>& examples) {
  std::vector<RelationExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    if (e.senses.size() <= 1) {
      out.push_back(e);
      continue;
    }
    for (const auto& sense : e.senses) {
      RelationExample copy = e;
      copy.senses = {sense};
      out.push_back(std::move(copy));
    }
  }
  return out;
}

} // namespace hiercon
