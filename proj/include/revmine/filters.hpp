#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "revmine/corpus.hpp"

namespace revmine {

enum class InstructionalForm {
  Imperative,
  InstructionalIndicative,
  LetPassive,
  None,
};

const char* to_string(InstructionalForm form);

struct FilterConfig {
  int min_len = 4;
  int max_len = 50;
  int max_edit_distance_exclusive = 10;
  std::unordered_set<std::string> subject_allowlist = {"you", "it", "one"};
  std::string let_lemma = "let";

  void validate() const;
};

// Stable rule identifiers used in FilterDecision::reasons and drop reports.
namespace rule {
inline constexpr const char* kDictionaryOriginal = "dictionary(original)";
inline constexpr const char* kDictionaryRevised = "dictionary(revised)";
inline constexpr const char* kLengthOriginal = "length(original)";
inline constexpr const char* kLengthRevised = "length(revised)";
inline constexpr const char* kFormOriginal = "instructional-form(original)";
inline constexpr const char* kFormRevised = "instructional-form(revised)";
inline constexpr const char* kEditDistance = "edit-distance";
}  // namespace rule

struct FilterDecision {
  bool keep = false;
  std::vector<std::string> reasons;  // empty iff keep
  InstructionalForm form_original = InstructionalForm::None;
  InstructionalForm form_revised = InstructionalForm::None;
};

// Unit-cost insert/delete/substitute distance over Unicode scalar values.
size_t levenshtein(std::string_view a, std::string_view b);

// Word count: non-punctuation tokens when annotated, whitespace chunks
// otherwise.
size_t word_count(const AnnotatedSentence& sentence);
bool length_ok(const AnnotatedSentence& sentence, const FilterConfig& cfg);

// True iff every alphabetic token is in dict (lowercased lookup). Tokens
// containing digits or made of punctuation only are exempt.
bool dictionary_ok(const AnnotatedSentence& sentence,
                   const std::unordered_set<std::string>& dict);

// Rules checked in order: LetPassive, InstructionalIndicative, Imperative.
// Unannotated sentences classify as None.
InstructionalForm instructional_form(const AnnotatedSentence& sentence,
                                     const FilterConfig& cfg);

FilterDecision filter_pair(const RevisionPair& pair, const FilterConfig& cfg,
                           const std::unordered_set<std::string>& dict);

// Per-rule drop counts accumulated over a corpus run.
struct FilterReport {
  size_t total = 0;
  size_t kept = 0;
  std::map<std::string, size_t> drops_by_rule;

  void add(const FilterDecision& decision);
  std::string to_tsv() const;
};

}  // namespace revmine
