#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "revmine/corpus.hpp"

namespace revmine {

// Fallback for words missing from the table. Zero keeps out-of-vocabulary
// influence inert; HashedRandom keeps toy experiments nondegenerate.
struct OovPolicy {
  enum class Kind { Zero, HashedRandom };
  Kind kind = Kind::Zero;
  uint64_t seed = 0;

  static OovPolicy zero() { return {}; }
  static OovPolicy hashed_random(uint64_t seed) {
    return {Kind::HashedRandom, seed};
  }
};

class EmbeddingTable {
 public:
  EmbeddingTable(int dim, OovPolicy oov) : dim_(dim), oov_(oov) {
    if (dim <= 0) throw Error("embedding dimension must be positive");
  }

  int dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  const OovPolicy& oov_policy() const { return oov_; }
  void set_oov_policy(OovPolicy p) { oov_ = p; }

  void insert(const std::string& word, Eigen::VectorXd vec);
  const Eigen::VectorXd* find(const std::string& word) const;

  // Lookup order: surface form, lowercased surface, OOV policy.
  Eigen::VectorXd vector_for(const std::string& word) const;

 private:
  int dim_;
  OovPolicy oov_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

// Text format: one `word v1 ... vd` row per line, optional `count dim`
// header. All rows must share one dimension; expected_d is enforced when
// given.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<int> expected_d = std::nullopt,
                               OovPolicy oov = OovPolicy::zero());

// Row t is the vector of token t; output is exactly T x d.
Eigen::MatrixXd embed_sentence(const std::vector<std::string>& tokens,
                               const EmbeddingTable& table);

// Token surfaces when annotated, whitespace chunks otherwise.
std::vector<std::string> embedding_tokens(const AnnotatedSentence& sentence);

// Inner-product cosine; zero vectors are an error.
double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Precomputed per-sentence token-vector matrices, JSONL records
// {pair_id, side, matrix}; side is "original" or "revised". Lets a
// contextual encoder feed the ranker without code changes.
class PrecomputedStore {
 public:
  PrecomputedStore() = default;
  explicit PrecomputedStore(const std::string& path);

  const Eigen::MatrixXd* find(const std::string& pair_id,
                              const std::string& side) const;
  size_t size() const { return matrices_.size(); }

 private:
  std::unordered_map<std::string, Eigen::MatrixXd> matrices_;  // key: id\tside
};

}  // namespace revmine
