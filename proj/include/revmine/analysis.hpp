#pragma once

#include <string>
#include <vector>

#include "revmine/embed.hpp"
#include "revmine/framerel.hpp"

namespace revmine {

// One scored pair after evaluation: probability mass per slot, the decision,
// and the metadata the error breakdowns group by.
struct PairPrediction {
  std::string pair_id;
  double l_a = 0.0;
  double l_b = 0.0;
  char predicted_slot = 'A';  // slot predicted to hold the revised sentence
  char gold_slot = 'B';
  bool correct = false;
  bool tie = false;  // exact l_a == l_b; scored as incorrect
  RelationLabel relation = RelationLabel::Other;
  std::string root_verb_original;  // root lemma, lowercased; may be empty
  std::string root_verb_revised;
};

// Fraction of correct pair decisions. Empty input is an error.
double evaluate(const std::vector<PairPrediction>& predictions);

struct RelationErrorRow {
  RelationLabel relation;
  size_t errors = 0;
  size_t total = 0;
};

// Four rows in the order Usage, Inheritance, Subframe, Other; zero rows
// included so the table shape is stable.
std::vector<RelationErrorRow> per_relation_errors(
    const std::vector<PairPrediction>& predictions);

struct ConfusedVerbPair {
  std::string verb_original;
  std::string verb_revised;
  size_t errors = 0;
  double cosine = 0.0;
  bool cosine_defined = false;  // false when either vector is zero/missing
};

struct ConfusionReport {
  std::vector<ConfusedVerbPair> top;  // by error count, ties lexicographic
  // Mean cosine over every evaluated verb pair (correct and incorrect) with
  // a defined cosine; the denominator is reported alongside.
  double mean_cosine_all_pairs = 0.0;
  size_t mean_denominator = 0;
  size_t pairs_with_verbs = 0;
};

ConfusionReport confusion_verbs(const std::vector<PairPrediction>& predictions,
                                const EmbeddingTable& table, size_t k);

// Report serialization used by the analyze stage.
std::string accuracy_to_tsv(const std::vector<PairPrediction>& predictions);
std::string relation_errors_to_tsv(const std::vector<RelationErrorRow>& rows);
std::string confusion_to_tsv(const ConfusionReport& report);
std::string analysis_to_json(const std::vector<PairPrediction>& predictions,
                             const std::vector<RelationErrorRow>& rows,
                             const ConfusionReport& report);

// Prediction records as JSONL, one object per pair.
void write_predictions(const std::string& path,
                       const std::vector<PairPrediction>& predictions);
std::vector<PairPrediction> read_predictions(const std::string& path);

}  // namespace revmine
