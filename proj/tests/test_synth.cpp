#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "hiercon/synth.hpp"

using namespace hiercon;

namespace {

const SenseHierarchy& pdtb3() { return builtin_hierarchy(HierarchyVersion::pdtb3); }

double overlap(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
  double s = 0;
  for (const auto& [tok, w] : p)
    if (auto it = q.find(tok); it != q.end()) s += std::min(w, it->second);
  return s;
}

std::string dump(const Corpus& c) {
  std::ostringstream out;
  write_corpus(out, c.examples);
  return out.str();
}

} // namespace

TEST_CASE("one block of examples per terminal") {
  const Corpus c = generate(pdtb3(), 20, 1, 0.0);
  CHECK(c.examples.size() == 20 * pdtb3().terminals().size());
  std::map<std::string, int> per;
  for (const auto& e : c.examples) {
    CHECK(e.senses.size() == 1);
    CHECK(e.section >= 0);
    CHECK(e.section <= 22);
    CHECK((e.connectives.size() == 1 || e.connectives.size() == 2));
    ++per[e.senses[0].terminal];
  }
  for (const auto& t : pdtb3().terminals()) CHECK(per[t] == 20);
}

TEST_CASE("same seed gives the same bytes") {
  CHECK(dump(generate(pdtb3(), 5, 3, 0.1)) == dump(generate(pdtb3(), 5, 3, 0.1)));
  CHECK(dump(generate(pdtb3(), 5, 3, 0.1)) != dump(generate(pdtb3(), 5, 4, 0.1)));
}

TEST_CASE("noisy second senses come from another level-1") {
  const Corpus c = generate(pdtb3(), 30, 2, 0.5);
  int multi = 0;
  for (const auto& e : c.examples) {
    if (e.senses.size() < 2) continue;
    ++multi;
    CHECK(e.senses[0].l1 != e.senses[1].l1);
  }
  CHECK(multi > 0);
  CHECK(multi < static_cast<int>(c.examples.size()));
}

TEST_CASE("sisters share more vocabulary than cross-level-1 pairs") {
  const auto& h = pdtb3();
  const auto prec = label_token_distribution(h, "Temporal.Asynchronous.Precedence");
  const auto succ = label_token_distribution(h, "Temporal.Asynchronous.Succession");
  const auto sync = label_token_distribution(h, "Temporal.Synchronous");
  const auto reason = label_token_distribution(h, "Contingency.Cause.Reason");
  double total = 0;
  for (const auto& [tok, w] : prec) total += w;
  CHECK(total == doctest::Approx(1.0));
  CHECK(overlap(prec, succ) > overlap(prec, sync));
  CHECK(overlap(prec, sync) > overlap(prec, reason));

  std::map<std::string, std::map<std::string, double>> dist;
  for (const auto& t : h.terminals()) dist[t] = label_token_distribution(h, t);
  for (const auto& a : h.terminals())
    for (const auto& b : h.terminals())
      for (const auto& c : h.terminals()) {
        const auto& la = h.label_index().at(a);
        if (a == b || la.l1 != h.label_index().at(b).l1 || la.l1 == h.label_index().at(c).l1)
          continue;
        CHECK(overlap(dist[a], dist[b]) > overlap(dist[a], dist[c]));
      }
}

TEST_CASE("connectives come from the label's list") {
  const Corpus c = generate(pdtb3(), 10, 5, 0.0);
  for (const auto& e : c.examples) {
    const auto allowed = label_connectives(pdtb3(), e.senses[0].terminal);
    for (const auto& conn : e.connectives)
      CHECK(std::find(allowed.begin(), allowed.end(), conn) != allowed.end());
  }
}

TEST_CASE("generated corpora ingest without rejects") {
  for (auto v : {HierarchyVersion::pdtb2, HierarchyVersion::pdtb3}) {
    const auto& h = builtin_hierarchy(v);
    const Corpus c = generate(h, 8, 11, 0.2);
    std::stringstream s(dump(c));
    const auto r = ingest(s, h);
    CHECK(r.rejects.empty());
    CHECK(r.corpus.examples == c.examples);
  }
}
