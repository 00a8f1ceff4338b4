#include "revmine/filters.hpp"

#include <algorithm>
#include <sstream>

namespace revmine {

const char* to_string(InstructionalForm form) {
  switch (form) {
    case InstructionalForm::Imperative:
      return "Imperative";
    case InstructionalForm::InstructionalIndicative:
      return "InstructionalIndicative";
    case InstructionalForm::LetPassive:
      return "LetPassive";
    case InstructionalForm::None:
      return "None";
  }
  return "None";
}

void FilterConfig::validate() const {
  if (min_len <= 0 || min_len > max_len)
    throw Error("filter config requires 0 < min_len <= max_len");
  if (max_edit_distance_exclusive < 1)
    throw Error("filter config requires max_edit_distance_exclusive >= 1");
}

size_t levenshtein(std::string_view a, std::string_view b) {
  std::u32string ua = util::decode_utf8(a);
  std::u32string ub = util::decode_utf8(b);
  if (ua.size() < ub.size()) std::swap(ua, ub);
  const size_t n = ub.size();
  std::vector<size_t> prev(n + 1), cur(n + 1);
  for (size_t j = 0; j <= n; ++j) prev[j] = j;
  for (size_t i = 1; i <= ua.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= n; ++j) {
      size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

size_t word_count(const AnnotatedSentence& sentence) {
  if (sentence.annotated()) {
    size_t n = 0;
    for (const Token& t : sentence.tokens) {
      if (t.upos != "PUNCT") ++n;
    }
    return n;
  }
  return util::split_ws(sentence.text).size();
}

bool length_ok(const AnnotatedSentence& sentence, const FilterConfig& cfg) {
  size_t n = word_count(sentence);
  return n >= static_cast<size_t>(cfg.min_len) &&
         n <= static_cast<size_t>(cfg.max_len);
}

namespace {

bool has_ascii_alpha(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

bool has_ascii_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// Raw whitespace chunks carry their punctuation ("cord."); strip it before
// the dictionary lookup. Annotated tokens arrive already separated.
std::string strip_outer_punct(std::string_view chunk) {
  size_t b = 0, e = chunk.size();
  auto is_word_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || static_cast<unsigned char>(c) >= 0x80;
  };
  while (b < e && !is_word_char(chunk[b])) ++b;
  while (e > b && !is_word_char(chunk[e - 1])) --e;
  return std::string(chunk.substr(b, e - b));
}

std::vector<std::string> vocabulary_tokens(const AnnotatedSentence& sentence) {
  std::vector<std::string> out;
  if (sentence.annotated()) {
    for (const Token& t : sentence.tokens) out.push_back(t.surface);
    return out;
  }
  for (const std::string& chunk : util::split_ws(sentence.text))
    out.push_back(strip_outer_punct(chunk));
  return out;
}

bool is_passive_marker(const std::string& deprel) {
  std::string d = util::lower_ascii(deprel);
  return d == "nsubj:pass" || d == "csubj:pass" || d == "aux:pass" ||
         d == "expl:pass" || d == "nsubjpass" || d == "csubjpass" ||
         d == "auxpass";
}

bool is_nominal_subject(const std::string& deprel, bool include_passive) {
  std::string d = util::lower_ascii(deprel);
  if (d == "nsubj") return true;
  if (include_passive && (d == "nsubj:pass" || d == "nsubjpass")) return true;
  return false;
}

// True when following head links from tokens[i] reaches the root token.
bool in_subtree_of_root(const std::vector<Token>& tokens, size_t i,
                        int root_token_index) {
  int current = tokens[i].index;
  for (size_t steps = 0; steps <= tokens.size(); ++steps) {
    if (current == root_token_index) return true;
    int head = 0;
    bool found = false;
    for (const Token& t : tokens) {
      if (t.index == current) {
        head = t.head;
        found = true;
        break;
      }
    }
    if (!found || head == 0) return false;
    current = head;
  }
  return false;
}

}  // namespace

bool dictionary_ok(const AnnotatedSentence& sentence,
                   const std::unordered_set<std::string>& dict) {
  for (const std::string& tok : vocabulary_tokens(sentence)) {
    if (!has_ascii_alpha(tok) || has_ascii_digit(tok)) continue;
    if (dict.find(util::lower_ascii(tok)) == dict.end()) return false;
  }
  return true;
}

InstructionalForm instructional_form(const AnnotatedSentence& sentence,
                                     const FilterConfig& cfg) {
  if (!sentence.annotated()) return InstructionalForm::None;
  const std::vector<Token>& toks = sentence.tokens;
  const Token& root = toks[sentence.root_index()];

  if (util::lower_ascii(root.lemma) == cfg.let_lemma) {
    for (size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].head == 0) continue;
      if (is_passive_marker(toks[i].deprel) &&
          in_subtree_of_root(toks, i, root.index)) {
        return InstructionalForm::LetPassive;
      }
    }
  }

  bool has_subject = false;  // active or passive nominal subject of the root
  for (const Token& t : toks) {
    if (t.head != root.index) continue;
    if (is_nominal_subject(t.deprel, /*include_passive=*/false) &&
        cfg.subject_allowlist.count(util::lower_ascii(t.lemma)) > 0) {
      return InstructionalForm::InstructionalIndicative;
    }
    if (is_nominal_subject(t.deprel, /*include_passive=*/true))
      has_subject = true;
  }

  if (root.upos == "VERB" && !has_subject) return InstructionalForm::Imperative;
  return InstructionalForm::None;
}

FilterDecision filter_pair(const RevisionPair& pair, const FilterConfig& cfg,
                           const std::unordered_set<std::string>& dict) {
  cfg.validate();
  FilterDecision d;
  d.form_original = instructional_form(pair.original, cfg);
  d.form_revised = instructional_form(pair.revised, cfg);

  if (!dictionary_ok(pair.original, dict))
    d.reasons.push_back(rule::kDictionaryOriginal);
  if (!dictionary_ok(pair.revised, dict))
    d.reasons.push_back(rule::kDictionaryRevised);
  if (!length_ok(pair.original, cfg)) d.reasons.push_back(rule::kLengthOriginal);
  if (!length_ok(pair.revised, cfg)) d.reasons.push_back(rule::kLengthRevised);
  if (d.form_original == InstructionalForm::None)
    d.reasons.push_back(rule::kFormOriginal);
  if (d.form_revised == InstructionalForm::None)
    d.reasons.push_back(rule::kFormRevised);

  size_t dist = levenshtein(util::normalize_ws(pair.original.text),
                            util::normalize_ws(pair.revised.text));
  if (dist >= static_cast<size_t>(cfg.max_edit_distance_exclusive))
    d.reasons.push_back(rule::kEditDistance);

  d.keep = d.reasons.empty();
  return d;
}

void FilterReport::add(const FilterDecision& decision) {
  ++total;
  if (decision.keep) {
    ++kept;
    return;
  }
  for (const std::string& r : decision.reasons) ++drops_by_rule[r];
}

std::string FilterReport::to_tsv() const {
  // All seven rules always appear so the report shape is stable.
  const char* rules[] = {rule::kDictionaryOriginal, rule::kDictionaryRevised,
                         rule::kLengthOriginal,     rule::kLengthRevised,
                         rule::kFormOriginal,       rule::kFormRevised,
                         rule::kEditDistance};
  std::ostringstream out;
  out << "rule\tcount\n";
  out << "total\t" << total << "\n";
  out << "kept\t" << kept << "\n";
  out << "dropped\t" << (total - kept) << "\n";
  for (const char* r : rules) {
    auto it = drops_by_rule.find(r);
    out << r << '\t' << (it == drops_by_rule.end() ? 0 : it->second) << "\n";
  }
  return out.str();
}

}  // namespace revmine
