#include "revmine/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace revmine {

const char* to_string(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Test:
      return "test";
    case Split::Val:
      return "val";
  }
  return "train";
}

std::unordered_map<std::string, std::string> PartitionMap::as_strings() const {
  std::unordered_map<std::string, std::string> out;
  for (const auto& [article, split] : by_article) out[article] = to_string(split);
  return out;
}

PartitionMap load_partition_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open partition file: " + path);
  PartitionMap pm;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = util::split(line, '\t');
    if (cols.size() != 2) {
      throw Error("partition line " + std::to_string(line_no) +
                  ": expected `article_id<TAB>split`");
    }
    std::string article = util::trim(cols[0]);
    std::string split_name = util::trim(cols[1]);
    Split split;
    if (split_name == "train") split = Split::Train;
    else if (split_name == "test") split = Split::Test;
    else if (split_name == "val") split = Split::Val;
    else
      throw Error("partition line " + std::to_string(line_no) +
                  ": unknown split '" + split_name + "'");
    auto [it, inserted] = pm.by_article.emplace(article, split);
    if (!inserted && it->second != split) {
      throw Error("partition line " + std::to_string(line_no) +
                  ": article '" + article + "' mapped to two splits");
    }
  }
  return pm;
}

SplitResult split_dataset(const std::vector<RevisionPair>& pairs,
                          const PartitionMap& pm) {
  std::set<std::string> unmapped;
  for (const RevisionPair& p : pairs) {
    if (pm.by_article.find(p.article_id) == pm.by_article.end())
      unmapped.insert(p.article_id);
  }
  if (!unmapped.empty()) {
    std::ostringstream msg;
    msg << "articles missing from partition map:";
    for (const std::string& a : unmapped) msg << ' ' << a;
    throw Error(msg.str());
  }
  SplitResult out;
  for (const RevisionPair& p : pairs) {
    switch (pm.by_article.at(p.article_id)) {
      case Split::Train:
        out.train.push_back(p);
        break;
      case Split::Test:
        out.test.push_back(p);
        break;
      case Split::Val:
        out.val.push_back(p);
        break;
    }
  }
  return out;
}

SlotAssignment assign_slots(const RevisionPair& pair, uint64_t seed) {
  uint64_t h = util::mix64(util::fnv1a64(pair.pair_id) ^ util::mix64(seed));
  SlotAssignment a;
  a.pair_id = pair.pair_id;
  a.slot_a_holds = (h & 1) ? SlotContent::Revised : SlotContent::Original;
  return a;
}

void apply_slot_assignments(std::vector<RevisionPair>& pairs, uint64_t seed) {
  for (RevisionPair& p : pairs) {
    SlotAssignment a = assign_slots(p, seed);
    p.slot_a = a.slot_a_holds == SlotContent::Revised ? "revised" : "original";
  }
}

}  // namespace revmine
