#include "revmine/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace revmine {

using nlohmann::json;
using nlohmann::ordered_json;

double evaluate(const std::vector<PairPrediction>& predictions) {
  if (predictions.empty())
    throw Error("cannot compute accuracy over zero predictions");
  size_t correct = 0;
  for (const PairPrediction& p : predictions) correct += p.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::vector<RelationErrorRow> per_relation_errors(
    const std::vector<PairPrediction>& predictions) {
  const RelationLabel order[] = {RelationLabel::Usage,
                                 RelationLabel::Inheritance,
                                 RelationLabel::Subframe, RelationLabel::Other};
  std::vector<RelationErrorRow> rows;
  for (RelationLabel label : order) rows.push_back({label, 0, 0});
  for (const PairPrediction& p : predictions) {
    for (RelationErrorRow& row : rows) {
      if (row.relation == p.relation) {
        ++row.total;
        if (!p.correct) ++row.errors;
      }
    }
  }
  return rows;
}

ConfusionReport confusion_verbs(const std::vector<PairPrediction>& predictions,
                                const EmbeddingTable& table, size_t k) {
  ConfusionReport report;
  std::map<std::pair<std::string, std::string>, size_t> error_counts;
  double cosine_sum = 0.0;
  for (const PairPrediction& p : predictions) {
    if (p.root_verb_original.empty() || p.root_verb_revised.empty()) continue;
    ++report.pairs_with_verbs;
    Eigen::VectorXd u = table.vector_for(p.root_verb_original);
    Eigen::VectorXd v = table.vector_for(p.root_verb_revised);
    if (u.norm() > 0.0 && v.norm() > 0.0) {
      cosine_sum += cosine(u, v);
      ++report.mean_denominator;
    }
    if (!p.correct)
      ++error_counts[{p.root_verb_original, p.root_verb_revised}];
  }
  if (report.mean_denominator > 0)
    report.mean_cosine_all_pairs =
        cosine_sum / static_cast<double>(report.mean_denominator);

  std::vector<ConfusedVerbPair> ranked;
  for (const auto& [verbs, errors] : error_counts) {
    ConfusedVerbPair cp;
    cp.verb_original = verbs.first;
    cp.verb_revised = verbs.second;
    cp.errors = errors;
    Eigen::VectorXd u = table.vector_for(cp.verb_original);
    Eigen::VectorXd v = table.vector_for(cp.verb_revised);
    if (u.norm() > 0.0 && v.norm() > 0.0) {
      cp.cosine = cosine(u, v);
      cp.cosine_defined = true;
    }
    ranked.push_back(std::move(cp));
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const ConfusedVerbPair& a, const ConfusedVerbPair& b) {
              if (a.errors != b.errors) return a.errors > b.errors;
              if (a.verb_original != b.verb_original)
                return a.verb_original < b.verb_original;
              return a.verb_revised < b.verb_revised;
            });
  if (ranked.size() > k) ranked.resize(k);
  report.top = std::move(ranked);
  return report;
}

std::string accuracy_to_tsv(const std::vector<PairPrediction>& predictions) {
  size_t correct = 0, ties = 0;
  for (const PairPrediction& p : predictions) {
    correct += p.correct ? 1 : 0;
    ties += p.tie ? 1 : 0;
  }
  std::ostringstream out;
  out << "metric\tvalue\n";
  out << "pairs\t" << predictions.size() << '\n';
  out << "correct\t" << correct << '\n';
  out << "ties\t" << ties << '\n';
  out << "accuracy\t" << evaluate(predictions) << '\n';
  return out.str();
}

std::string relation_errors_to_tsv(const std::vector<RelationErrorRow>& rows) {
  std::ostringstream out;
  out << "relation\terrors\ttotal\n";
  for (const RelationErrorRow& row : rows)
    out << to_string(row.relation) << '\t' << row.errors << '\t' << row.total
        << '\n';
  return out.str();
}

std::string confusion_to_tsv(const ConfusionReport& report) {
  std::ostringstream out;
  out << "verb_original\tverb_revised\terrors\tcosine\n";
  for (const ConfusedVerbPair& cp : report.top) {
    out << cp.verb_original << '\t' << cp.verb_revised << '\t' << cp.errors
        << '\t';
    if (cp.cosine_defined) out << cp.cosine;
    else out << "nan";
    out << '\n';
  }
  out << "# mean cosine over " << report.mean_denominator
      << " evaluated verb pairs\t" << report.mean_cosine_all_pairs << '\n';
  return out.str();
}

std::string analysis_to_json(const std::vector<PairPrediction>& predictions,
                             const std::vector<RelationErrorRow>& rows,
                             const ConfusionReport& report) {
  ordered_json j;
  j["pairs"] = predictions.size();
  j["accuracy"] = evaluate(predictions);
  ordered_json by_relation = ordered_json::array();
  for (const RelationErrorRow& row : rows) {
    by_relation.push_back({{"relation", to_string(row.relation)},
                           {"errors", row.errors},
                           {"total", row.total}});
  }
  j["by_relation"] = by_relation;
  ordered_json confused = ordered_json::array();
  for (const ConfusedVerbPair& cp : report.top) {
    ordered_json item = {{"verb_original", cp.verb_original},
                         {"verb_revised", cp.verb_revised},
                         {"errors", cp.errors}};
    if (cp.cosine_defined) item["cosine"] = cp.cosine;
    else item["cosine"] = nullptr;
    confused.push_back(item);
  }
  j["confused_verb_pairs"] = confused;
  j["mean_cosine_all_pairs"] = report.mean_cosine_all_pairs;
  j["mean_cosine_denominator"] = report.mean_denominator;
  return j.dump(2);
}

void write_predictions(const std::string& path,
                       const std::vector<PairPrediction>& predictions) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open predictions file for writing: " + path);
  for (const PairPrediction& p : predictions) {
    json j;
    j["pair_id"] = p.pair_id;
    j["l_A"] = p.l_a;
    j["l_B"] = p.l_b;
    j["predicted_slot"] = std::string(1, p.predicted_slot);
    j["gold_slot"] = std::string(1, p.gold_slot);
    j["correct"] = p.correct;
    j["tie"] = p.tie;
    j["relation"] = to_string(p.relation);
    j["root_verb_original"] = p.root_verb_original;
    j["root_verb_revised"] = p.root_verb_revised;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<PairPrediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions file: " + path);
  std::vector<PairPrediction> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    PairPrediction p;
    p.pair_id = j.at("pair_id").get<std::string>();
    p.l_a = j.at("l_A").get<double>();
    p.l_b = j.at("l_B").get<double>();
    p.predicted_slot = j.at("predicted_slot").get<std::string>().at(0);
    p.gold_slot = j.at("gold_slot").get<std::string>().at(0);
    p.correct = j.at("correct").get<bool>();
    p.tie = j.value("tie", false);
    p.relation = relation_label_from_string(j.at("relation").get<std::string>());
    p.root_verb_original = j.value("root_verb_original", std::string());
    p.root_verb_revised = j.value("root_verb_revised", std::string());
    if (p.correct != (p.predicted_slot == p.gold_slot))
      throw Error(path + ":" + std::to_string(line_no) +
                  ": correct flag contradicts slots");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace revmine
