#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hiercon/corpus.hpp"
#include "hiercon/sense_hierarchy.hpp"

namespace hiercon {

struct SynthOptions {
  /// Token mass drawn from the pool shared by all terminals of one level-1 sense.
  double sister_share = 0.5;
  /// Token mass drawn from the pool shared by every terminal.
  double cross_share = 0.1;
  /// Of the remaining mass, the part drawn from the level-2 pool; the rest
  /// comes from the terminal's own pool.
  double level2_fraction = 0.5;
  int min_arg_tokens = 8;
  int max_arg_tokens = 14;
};

/// Token distribution a terminal's arguments are sampled from.
std::map<std::string, double> label_token_distribution(const SenseHierarchy& h,
                                                       const std::string& terminal,
                                                       const SynthOptions& opt = {});

/// Connectives that may be recorded for a terminal.
std::vector<std::string> label_connectives(const SenseHierarchy& h, const std::string& terminal);

/// `per_class` examples per terminal, sections assigned round-robin over
/// 0-22. A `noise` fraction of examples carries a second sense from another
/// level-1 class. Deterministic in `seed`. `h` must outlive the corpus.
Corpus generate(const SenseHierarchy& h, int per_class, std::uint64_t seed, double noise,
                const SynthOptions& opt = {});

} // namespace hiercon
