#include "hiercon/augmentation.hpp"

#include <cctype>

#include "hiercon/error.hpp"

namespace hiercon {

namespace {

// Leading word kept as-is when it is "I" or looks like an acronym ("IBM").
bool keep_leading_case(std::string_view text) {
  const std::size_t end = text.find(' ');
  const std::string_view word = text.substr(0, end);
  if (word == "I") return true;
  return word.size() > 1 && std::isupper(static_cast<unsigned char>(word[1]));
}

} // namespace

std::string insert_connective(std::string_view connective, std::string_view arg2) {
  std::string conn(connective);
  if (!conn.empty()) conn[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(conn[0])));
  std::string rest(arg2);
  const std::size_t first = rest.find_first_not_of(' ');
  rest.erase(0, first == std::string::npos ? rest.size() : first);
  if (!rest.empty() && !keep_leading_case(rest))
    rest[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(rest[0])));
  return conn + ", " + rest;
}

std::vector<RelationExample> augment(const RelationExample& e) {
  if (e.provenance == Provenance::augmented)
    throw UsageError("augment: example '" + e.rel_id + "' is already augmented");
  if (e.connectives.empty())
    throw UsageError("augment: example '" + e.rel_id + "' has no recorded connectives");
  if (e.senses.size() != 1)
    throw UsageError("augment: example '" + e.rel_id + "' must be multi-label expanded first");
  std::vector<RelationExample> out;
  out.reserve(e.connectives.size());
  for (const auto& conn : e.connectives) {
    RelationExample a = e;
    a.arg2 = insert_connective(conn, e.arg2);
    a.provenance = Provenance::augmented;
    a.inserted_connective = conn;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<RelationExample> build_training_pool(const std::vector<RelationExample>& train) {
  std::vector<RelationExample> pool;
  pool.reserve(train.size() * 3);
  for (const auto& e : train) {
    pool.push_back(e);
    for (auto& a : augment(e)) pool.push_back(std::move(a));
  }
  return pool;
}

} // namespace hiercon
