#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "revmine/corpus.hpp"

namespace revmine {

enum class Split { Train, Test, Val };
const char* to_string(Split s);

// article_id -> split. Loaded from TSV `article_id<TAB>split`.
struct PartitionMap {
  std::unordered_map<std::string, Split> by_article;

  std::unordered_map<std::string, std::string> as_strings() const;
};

PartitionMap load_partition_map(const std::string& path);

struct SplitResult {
  std::vector<RevisionPair> train;
  std::vector<RevisionPair> test;
  std::vector<RevisionPair> val;
};

// Disjoint, exhaustive, by article. Unmapped article ids are an error
// listing every offending id.
SplitResult split_dataset(const std::vector<RevisionPair>& pairs,
                          const PartitionMap& pm);

enum class SlotContent { Original, Revised };

struct SlotAssignment {
  std::string pair_id;
  SlotContent slot_a_holds = SlotContent::Original;

  char gold_revised_slot() const {
    return slot_a_holds == SlotContent::Revised ? 'A' : 'B';
  }
};

// Deterministic function of (seed, pair_id), balanced to ~50% over many
// pairs. Slot assignment exists so that neither input slot systematically
// holds the original during training.
SlotAssignment assign_slots(const RevisionPair& pair, uint64_t seed);

// Fill each pair's slot_a field from assign_slots.
void apply_slot_assignments(std::vector<RevisionPair>& pairs, uint64_t seed);

}  // namespace revmine
