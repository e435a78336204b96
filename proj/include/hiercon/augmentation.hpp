#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hiercon/corpus.hpp"

namespace hiercon {

/// Arg2 with `connective` prepended: "In contrast, bond prices rallied".
std::string insert_connective(std::string_view connective, std::string_view arg2);

/// One augmented copy per recorded connective. Throws UsageError when `e`
/// is already augmented, has no connectives, or still carries two senses.
std::vector<RelationExample> augment(const RelationExample& e);

/// Originals with each one's augmented copies placed right after it.
std::vector<RelationExample> build_training_pool(const std::vector<RelationExample>& train);

} // namespace hiercon
