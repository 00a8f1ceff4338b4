#include "revmine/framerel.hpp"

#include <fstream>
#include <sstream>

namespace revmine {

const char* to_string(RelationLabel label) {
  switch (label) {
    case RelationLabel::Subframe:
      return "Subframe";
    case RelationLabel::Inheritance:
      return "Inheritance";
    case RelationLabel::Usage:
      return "Usage";
    case RelationLabel::Other:
      return "Other";
  }
  return "Other";
}

RelationLabel relation_label_from_string(std::string_view s) {
  if (s == "Subframe") return RelationLabel::Subframe;
  if (s == "Inheritance") return RelationLabel::Inheritance;
  if (s == "Usage") return RelationLabel::Usage;
  if (s == "Other") return RelationLabel::Other;
  throw Error("unknown relation label '" + std::string(s) + "'");
}

void FrameGraph::add_frame(const std::string& name) { frames_.insert(name); }

void FrameGraph::add_edge(const std::string& child, RelationType type,
                          const std::string& parent) {
  if (child == parent)
    throw Error("self-loop edge on frame '" + child + "' is not allowed");
  frames_.insert(child);
  frames_.insert(parent);
  edges_[child][parent] |= static_cast<uint8_t>(type);
}

bool FrameGraph::has_frame(const std::string& name) const {
  return frames_.count(name) > 0;
}

uint8_t FrameGraph::edge_types(const std::string& child,
                               const std::string& parent) const {
  auto it = edges_.find(child);
  if (it == edges_.end()) return 0;
  auto jt = it->second.find(parent);
  return jt == it->second.end() ? 0 : jt->second;
}

bool FrameGraph::has_edge(const std::string& child, RelationType type,
                          const std::string& parent) const {
  return (edge_types(child, parent) & static_cast<uint8_t>(type)) != 0;
}

size_t FrameGraph::edge_count() const {
  size_t n = 0;
  for (const auto& [child, parents] : edges_) {
    for (const auto& [parent, mask] : parents) {
      for (uint8_t bit = 1; bit <= 4; bit <<= 1) {
        if (mask & bit) ++n;
      }
    }
  }
  return n;
}

namespace {

RelationType relation_type_from_string(const std::string& s, size_t line_no) {
  if (s == "Inheritance") return RelationType::Inheritance;
  if (s == "Subframe") return RelationType::Subframe;
  if (s == "Using") return RelationType::Using;
  throw Error("frame graph line " + std::to_string(line_no) +
              ": unknown relation type '" + s +
              "' (expected Inheritance, Subframe or Using)");
}

}  // namespace

FrameGraph load_frame_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frame graph file: " + path);
  FrameGraph g;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = util::split(line, '\t');
    if (cols.size() != 3) {
      throw Error("frame graph line " + std::to_string(line_no) +
                  ": expected 3 tab-separated columns, got " +
                  std::to_string(cols.size()));
    }
    std::string child = util::trim(cols[0]);
    std::string parent = util::trim(cols[2]);
    if (child.empty() || parent.empty()) {
      throw Error("frame graph line " + std::to_string(line_no) +
                  ": empty frame name");
    }
    if (child == parent) {
      throw Error("frame graph line " + std::to_string(line_no) +
                  ": self-loop on frame '" + child + "'");
    }
    g.add_edge(child, relation_type_from_string(util::trim(cols[1]), line_no),
               parent);
  }
  return g;
}

RelationLabel classify_relation(const std::optional<std::string>& orig_frame,
                                const std::optional<std::string>& rev_frame,
                                const FrameGraph& g) {
  if (!orig_frame || !rev_frame) return RelationLabel::Other;
  if (!g.has_frame(*orig_frame) || !g.has_frame(*rev_frame))
    return RelationLabel::Other;
  if (*orig_frame == *rev_frame) return RelationLabel::Other;
  uint8_t mask = g.edge_types(/*child=*/*rev_frame, /*parent=*/*orig_frame);
  if (mask & static_cast<uint8_t>(RelationType::Subframe))
    return RelationLabel::Subframe;
  if (mask & static_cast<uint8_t>(RelationType::Inheritance))
    return RelationLabel::Inheritance;
  if (mask & static_cast<uint8_t>(RelationType::Using))
    return RelationLabel::Usage;
  return RelationLabel::Other;
}

size_t RelationStats::total() const {
  size_t n = 0;
  for (int label = 0; label < 4; ++label) n += counts[label][0];
  return n;
}

std::string RelationStats::to_tsv() const {
  const RelationLabel rows[] = {RelationLabel::Usage, RelationLabel::Inheritance,
                                RelationLabel::Subframe, RelationLabel::Other};
  std::ostringstream out;
  out << "relation\ttotal\ttrain\ttest\tval\n";
  size_t col_sum[4] = {};
  for (RelationLabel label : rows) {
    int r = static_cast<int>(label);
    out << to_string(label);
    for (int c = 0; c < 4; ++c) {
      out << '\t' << counts[r][c];
      col_sum[c] += counts[r][c];
    }
    out << '\n';
  }
  out << "Total";
  for (unsigned long c : col_sum) out << '\t' << c;
  out << '\n';
  out << "# reversed-direction non-Other (diagnostic)\t"
      << reversed_direction_hits << '\n';
  return out.str();
}

RelationStats relation_stats(
    const std::vector<RevisionPair>& labeled_pairs, const FrameGraph& g,
    const std::unordered_map<std::string, std::string>* split_by_article) {
  RelationStats stats;
  for (const RevisionPair& p : labeled_pairs) {
    if (!p.relation)
      throw Error("pair " + p.pair_id + " carries no relation label");
    RelationLabel label = relation_label_from_string(*p.relation);
    int r = static_cast<int>(label);
    ++stats.counts[r][0];
    if (split_by_article != nullptr) {
      auto it = split_by_article->find(p.article_id);
      if (it != split_by_article->end()) {
        if (it->second == "train") ++stats.counts[r][1];
        else if (it->second == "test") ++stats.counts[r][2];
        else if (it->second == "val") ++stats.counts[r][3];
      }
    }
    if (label == RelationLabel::Other) {
      RelationLabel reversed = classify_relation(p.revised.root_frame,
                                                 p.original.root_frame, g);
      if (reversed != RelationLabel::Other) ++stats.reversed_direction_hits;
    }
  }
  return stats;
}

}  // namespace revmine
