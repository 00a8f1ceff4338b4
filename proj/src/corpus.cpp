#include "revmine/corpus.hpp"

#include <sstream>

#include "json.hpp"

namespace revmine {

using nlohmann::json;

int AnnotatedSentence::root_index() const {
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].head == 0) return static_cast<int>(i);
  }
  throw Error("sentence has no root token: " + text);
}

namespace {

bool is_integer_field(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

void validate_tokens(const std::vector<Token>& tokens) {
  int roots = 0;
  for (const Token& t : tokens) {
    if (t.index < 1) throw Error("token index must be >= 1");
    if (t.head < 0) throw Error("token head must be >= 0");
    if (t.head == t.index)
      throw Error("token " + std::to_string(t.index) + " heads itself");
    if (t.head == 0) ++roots;
  }
  if (!tokens.empty() && roots != 1) {
    throw Error("annotation must have exactly one root token, found " +
                std::to_string(roots));
  }
}

}  // namespace

std::vector<Token> parse_conllu(std::string_view block) {
  std::vector<Token> tokens;
  size_t line_no = 0;
  for (const std::string& raw : util::split(block, '\n')) {
    ++line_no;
    std::string line = util::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = util::split(line, '\t');
    if (cols.size() < 8) {
      throw Error("conllu line " + std::to_string(line_no) +
                  ": expected 10 tab-separated columns, got " +
                  std::to_string(cols.size()));
    }
    const std::string& id = cols[0];
    // Multiword-token ranges ("2-4") and empty nodes ("8.1") carry no
    // dependency structure of their own.
    if (id.find('-') != std::string::npos ||
        id.find('.') != std::string::npos) {
      continue;
    }
    long idx = 0, head = 0;
    if (!is_integer_field(id) || !util::parse_int(id, idx)) {
      throw Error("conllu line " + std::to_string(line_no) +
                  ": non-integer ID '" + id + "'");
    }
    if (!is_integer_field(cols[6]) || !util::parse_int(cols[6], head)) {
      throw Error("conllu line " + std::to_string(line_no) +
                  ": non-integer HEAD '" + cols[6] + "'");
    }
    Token t;
    t.index = static_cast<int>(idx);
    t.surface = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.head = static_cast<int>(head);
    t.deprel = cols[7];
    tokens.push_back(std::move(t));
  }
  validate_tokens(tokens);
  return tokens;
}

std::string serialize_conllu(const std::vector<Token>& tokens) {
  std::ostringstream out;
  for (const Token& t : tokens) {
    out << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << t.upos
        << "\t_\t_\t" << t.head << '\t' << t.deprel << "\t_\t_\n";
  }
  return out.str();
}

namespace {

json sentence_to_json(const AnnotatedSentence& s) {
  json j;
  j["text"] = s.text;
  if (s.annotated()) j["conllu"] = serialize_conllu(s.tokens);
  if (s.root_frame) j["frame"] = *s.root_frame;
  return j;
}

AnnotatedSentence sentence_from_json(const json& j) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
    throw Error("sentence object must carry a string 'text' field");
  AnnotatedSentence s;
  s.text = j["text"].get<std::string>();
  if (j.contains("conllu")) {
    if (!j["conllu"].is_string()) throw Error("'conllu' must be a string");
    s.tokens = parse_conllu(j["conllu"].get<std::string>());
  }
  if (j.contains("frame")) {
    if (!j["frame"].is_string()) throw Error("'frame' must be a string");
    s.root_frame = j["frame"].get<std::string>();
  }
  return s;
}

const char* kRelationNames[] = {"Usage", "Inheritance", "Subframe", "Other"};

}  // namespace

std::string pair_to_json_line(const RevisionPair& pair) {
  json j;
  j["article_id"] = pair.article_id;
  j["pair_id"] = pair.pair_id;
  j["original"] = sentence_to_json(pair.original);
  j["revised"] = sentence_to_json(pair.revised);
  if (pair.relation) j["relation"] = *pair.relation;
  if (pair.slot_a) j["slot_a"] = *pair.slot_a;
  return j.dump();
}

RevisionPair pair_from_json_line(std::string_view line) {
  json j = json::parse(line);  // throws json::parse_error on bad syntax
  if (!j.is_object()) throw Error("record is not a JSON object");
  RevisionPair p;
  for (const char* key : {"article_id", "pair_id"}) {
    if (!j.contains(key) || !j[key].is_string())
      throw Error(std::string("record missing string field '") + key + "'");
  }
  p.article_id = j["article_id"].get<std::string>();
  p.pair_id = j["pair_id"].get<std::string>();
  if (p.pair_id.empty()) throw Error("empty pair_id");
  if (!j.contains("original") || !j.contains("revised"))
    throw Error("record missing 'original' or 'revised' sentence");
  p.original = sentence_from_json(j["original"]);
  p.revised = sentence_from_json(j["revised"]);
  if (p.original.text == p.revised.text)
    throw Error("original and revised text are identical in pair " +
                p.pair_id);
  if (j.contains("relation")) {
    std::string rel = j["relation"].get<std::string>();
    bool known = false;
    for (const char* name : kRelationNames) known |= (rel == name);
    if (!known) throw Error("unknown relation label '" + rel + "'");
    p.relation = rel;
  }
  if (j.contains("slot_a")) {
    std::string slot = j["slot_a"].get<std::string>();
    if (slot != "original" && slot != "revised")
      throw Error("slot_a must be 'original' or 'revised', got '" + slot +
                  "'");
    p.slot_a = slot;
  }
  return p;
}

PairsReader::PairsReader(const std::string& path) : in_(path), path_(path) {
  if (!in_) throw Error("cannot open pairs file: " + path);
}

std::optional<RevisionPair> PairsReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (util::trim(line).empty()) continue;
    RevisionPair p;
    try {
      p = pair_from_json_line(line);
    } catch (const std::exception& e) {
      throw Error(path_ + ":" + std::to_string(line_no_) +
                  ": malformed record: " + e.what());
    }
    if (!seen_ids_.insert(p.pair_id).second) {
      throw Error(path_ + ":" + std::to_string(line_no_) +
                  ": duplicate pair_id '" + p.pair_id + "'");
    }
    return p;
  }
  return std::nullopt;
}

std::vector<RevisionPair> read_pairs_file(const std::string& path) {
  PairsReader reader(path);
  std::vector<RevisionPair> out;
  while (auto p = reader.next()) out.push_back(std::move(*p));
  return out;
}

PairsWriter::PairsWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw Error("cannot open output file for writing: " + path);
}

void PairsWriter::write(const RevisionPair& pair) {
  out_ << pair_to_json_line(pair) << '\n';
  if (!out_) throw Error("write failed: " + path_);
}

void write_pairs_file(const std::string& path,
                      const std::vector<RevisionPair>& pairs) {
  PairsWriter writer(path);
  for (const RevisionPair& p : pairs) writer.write(p);
}

std::unordered_set<std::string> load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dictionary file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = util::trim(line);
    if (!w.empty()) words.insert(util::lower_ascii(w));
  }
  return words;
}

}  // namespace revmine
