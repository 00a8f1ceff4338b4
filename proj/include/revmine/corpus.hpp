#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "revmine/util.hpp"

namespace revmine {

// One token of a dependency-annotated sentence. head = 0 marks the root.
struct Token {
  int index = 0;  // 1-based position
  std::string surface;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct AnnotatedSentence {
  std::string text;
  std::vector<Token> tokens;  // empty when no annotation is attached
  std::optional<std::string> root_frame;

  bool annotated() const { return !tokens.empty(); }
  // Index into tokens of the head=0 token; requires annotated().
  int root_index() const;

  bool operator==(const AnnotatedSentence&) const = default;
};

// One original/revised instruction pair. The optional relation and slot_a
// fields are filled by later pipeline stages and round-trip through the
// JSONL record format.
struct RevisionPair {
  std::string article_id;
  std::string pair_id;
  AnnotatedSentence original;
  AnnotatedSentence revised;
  std::optional<std::string> relation;  // Usage|Inheritance|Subframe|Other
  std::optional<std::string> slot_a;    // original|revised

  bool operator==(const RevisionPair&) const = default;
};

// Parse one 10-column dependency annotation block. Comment lines ('#'),
// multiword ranges ("2-4") and empty nodes ("8.1") are skipped. Exactly one
// head=0 token is required unless the block yields no tokens at all.
std::vector<Token> parse_conllu(std::string_view block);
// Canonical 10-column emission (unused columns are '_').
std::string serialize_conllu(const std::vector<Token>& tokens);

// Record-at-a-time JSONL reader. Malformed lines and duplicate pair ids
// raise Error with the offending line number.
class PairsReader {
 public:
  explicit PairsReader(const std::string& path);
  std::optional<RevisionPair> next();

 private:
  std::ifstream in_;
  std::string path_;
  size_t line_no_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

std::vector<RevisionPair> read_pairs_file(const std::string& path);

class PairsWriter {
 public:
  explicit PairsWriter(const std::string& path);
  void write(const RevisionPair& pair);

 private:
  std::ofstream out_;
  std::string path_;
};

void write_pairs_file(const std::string& path,
                      const std::vector<RevisionPair>& pairs);

// JSON round-trip for a single record; used by the reader/writer and tests.
std::string pair_to_json_line(const RevisionPair& pair);
RevisionPair pair_from_json_line(std::string_view line);

// One lowercase word per line, UTF-8. Blank lines ignored.
std::unordered_set<std::string> load_dictionary(const std::string& path);

}  // namespace revmine
