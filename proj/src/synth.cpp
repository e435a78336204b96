#include "hiercon/synth.hpp"

#include <random>

#include "hiercon/error.hpp"

namespace hiercon {

namespace {

constexpr int kGlobalPool = 60;
constexpr int kLevel1Pool = 30;
constexpr int kLevel2Pool = 8;
constexpr int kTerminalPool = 8;
constexpr int kConnectivesPerLabel = 3;

// Pronounceable, collision-free pseudo-word for (pool id, index).
std::string pseudo_word(int pool, int index) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n",
                                            "p", "r", "s", "t", "v", "z"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
  std::string w;
  int v = pool * 64 + index + 1;
  while (v > 0) {
    w += kOnsets[v % 14];
    v /= 14;
    w += kVowels[v % 5];
    v /= 5;
  }
  return w;
}

struct Pools {
  int global = 0;
  int level1 = 0;
  int level2 = 0;
  int terminal = 0;
};

// Pool ids: 0 global, then one per level-1, level-2, and terminal in tree order.
Pools pools_of(const SenseHierarchy& h, const SenseLabel& label) {
  Pools p;
  int next = 1;
  for (const auto& n1 : h.roots()) {
    if (n1.name == label.l1) p.level1 = next;
    ++next;
  }
  for (const auto& n1 : h.roots())
    for (const auto& n2 : n1.children) {
      if (n1.name == label.l1 && n2.name == label.l2) p.level2 = next;
      ++next;
    }
  for (const auto& t : h.terminals()) {
    if (t == label.terminal) p.terminal = next;
    ++next;
  }
  return p;
}

struct Mixture {
  std::vector<std::string> words;
  std::vector<double> weights;
};

Mixture mixture_for(const SenseHierarchy& h, const std::string& terminal, const SynthOptions& opt) {
  const SenseLabel label = resolve_terminal(terminal, h);
  const Pools p = pools_of(h, label);
  const double rest = 1.0 - opt.sister_share - opt.cross_share;
  if (opt.sister_share < 0 || opt.cross_share < 0 || rest < 0)
    throw UsageError("synth: vocabulary shares must be non-negative and sum to at most 1");
  Mixture m;
  auto add = [&](int pool, int size, double mass) {
    for (int i = 0; i < size; ++i) {
      m.words.push_back(pseudo_word(pool, i));
      m.weights.push_back(mass / size);
    }
  };
  add(p.global, kGlobalPool, opt.cross_share);
  add(p.level1, kLevel1Pool, opt.sister_share);
  add(p.level2, kLevel2Pool, rest * opt.level2_fraction);
  add(p.terminal, kTerminalPool, rest * (1.0 - opt.level2_fraction));
  return m;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

} // namespace

std::map<std::string, double> label_token_distribution(const SenseHierarchy& h,
                                                       const std::string& terminal,
                                                       const SynthOptions& opt) {
  const Mixture m = mixture_for(h, terminal, opt);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < m.words.size(); ++i) out[m.words[i]] += m.weights[i];
  return out;
}

std::vector<std::string> label_connectives(const SenseHierarchy& h, const std::string& terminal) {
  const Pools p = pools_of(h, resolve_terminal(terminal, h));
  std::vector<std::string> out;
  // Two connectives shared with level-2 sisters, one of the terminal's own.
  out.push_back("so" + pseudo_word(p.level2, 40));
  out.push_back("then" + pseudo_word(p.level2, 41));
  out.push_back("thus" + pseudo_word(p.terminal, 42));
  static_assert(kConnectivesPerLabel == 3);
  return out;
}

Corpus generate(const SenseHierarchy& h, int per_class, std::uint64_t seed, double noise,
                const SynthOptions& opt) {
  if (per_class < 1) throw UsageError("synth: per_class must be at least 1");
  if (noise < 0.0 || noise > 1.0) throw UsageError("synth: noise must lie in [0, 1]");
  if (opt.min_arg_tokens < 1 || opt.max_arg_tokens < opt.min_arg_tokens)
    throw UsageError("synth: bad argument length range");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(opt.min_arg_tokens, opt.max_arg_tokens);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Mixture> mixtures;
  std::vector<std::discrete_distribution<std::size_t>> samplers;
  for (const auto& t : h.terminals()) {
    mixtures.push_back(mixture_for(h, t, opt));
    samplers.emplace_back(mixtures.back().weights.begin(), mixtures.back().weights.end());
  }

  auto sentence = [&](std::size_t label) {
    const int n = length(rng);
    std::string s;
    for (int i = 0; i < n; ++i) {
      const std::string& w = mixtures[label].words[samplers[label](rng)];
      if (i > 0) s += ' ';
      s += i == 0 ? capitalized(w) : w;
    }
    return s + ".";
  };

  Corpus c;
  c.version = h.version();
  c.hierarchy = &h;
  const auto& terminals = h.terminals();
  int k = 0;
  for (std::size_t t = 0; t < terminals.size(); ++t) {
    const SenseLabel label = resolve_terminal(terminals[t], h);
    const auto connectives = label_connectives(h, terminals[t]);
    for (int i = 0; i < per_class; ++i, ++k) {
      RelationExample e;
      char id[32];
      std::snprintf(id, sizeof id, "syn%06d", k);
      e.rel_id = id;
      e.section = k % 23;
      e.arg1 = sentence(t);
      e.arg2 = sentence(t);
      e.senses.push_back(label);
      e.connectives.push_back(connectives[rng() % connectives.size()]);

      if (unit(rng) < noise) {
        std::vector<std::size_t> others;
        for (std::size_t o = 0; o < terminals.size(); ++o)
          if (resolve_terminal(terminals[o], h).l1 != label.l1) others.push_back(o);
        const std::size_t o = others[rng() % others.size()];
        e.senses.push_back(resolve_terminal(terminals[o], h));
        const auto other_conns = label_connectives(h, terminals[o]);
        e.connectives.push_back(other_conns[rng() % other_conns.size()]);
      } else if (unit(rng) < 0.5) {
        std::string second = connectives[rng() % connectives.size()];
        if (second != e.connectives.front()) e.connectives.push_back(std::move(second));
      }
      c.examples.push_back(std::move(e));
    }
  }
  return c;
}

} // namespace hiercon
