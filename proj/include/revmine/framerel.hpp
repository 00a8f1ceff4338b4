#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "revmine/corpus.hpp"

namespace revmine {

// Typed frame-to-frame edges; the three relation types the classifier
// consults.
enum class RelationType : uint8_t {
  Inheritance = 1,
  Subframe = 2,
  Using = 4,
};

enum class RelationLabel { Subframe, Inheritance, Usage, Other };

const char* to_string(RelationLabel label);
RelationLabel relation_label_from_string(std::string_view s);

class FrameGraph {
 public:
  void add_frame(const std::string& name);
  // Edges are deduplicated; self-loops are rejected.
  void add_edge(const std::string& child, RelationType type,
                const std::string& parent);
  bool has_frame(const std::string& name) const;
  bool has_edge(const std::string& child, RelationType type,
                const std::string& parent) const;
  // Bitmask of RelationType values on direct child->parent edges.
  uint8_t edge_types(const std::string& child, const std::string& parent) const;
  size_t frame_count() const { return frames_.size(); }
  size_t edge_count() const;
  const std::unordered_set<std::string>& frames() const { return frames_; }

 private:
  std::unordered_set<std::string> frames_;
  // child -> parent -> type mask
  std::unordered_map<std::string, std::unordered_map<std::string, uint8_t>>
      edges_;
};

// TSV columns: child <TAB> relation <TAB> parent. Relation must be one of
// Inheritance, Subframe, Using.
FrameGraph load_frame_graph(const std::string& path);

// Direct edges with the revised frame as child and the original as parent,
// tested Subframe, then Inheritance, then Using. Absent or unknown frames
// and identical frames classify as Other.
RelationLabel classify_relation(const std::optional<std::string>& orig_frame,
                                const std::optional<std::string>& rev_frame,
                                const FrameGraph& g);

struct RelationStats {
  // counts[label][column]; columns 0..3 = Total, Train, Test, Val.
  size_t counts[4][4] = {};
  // Pairs labeled Other forward that would get a label with the edge
  // direction reversed; a diagnostic, not part of the taxonomy.
  size_t reversed_direction_hits = 0;

  size_t total() const;
  std::string to_tsv() const;
};

// Split lookup is by article_id; pairs with no mapping count in Total only.
RelationStats relation_stats(
    const std::vector<RevisionPair>& labeled_pairs, const FrameGraph& g,
    const std::unordered_map<std::string, std::string>* split_by_article =
        nullptr);

}  // namespace revmine
