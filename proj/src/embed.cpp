#include "revmine/embed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace revmine {

void EmbeddingTable::insert(const std::string& word, Eigen::VectorXd vec) {
  if (vec.size() != dim_)
    throw Error("vector for '" + word + "' has dimension " +
                std::to_string(vec.size()) + ", table uses " +
                std::to_string(dim_));
  if (!vec.allFinite())
    throw Error("vector for '" + word + "' contains a non-finite value");
  vectors_[word] = std::move(vec);
}

const Eigen::VectorXd* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

Eigen::VectorXd EmbeddingTable::vector_for(const std::string& word) const {
  if (const Eigen::VectorXd* v = find(word)) return *v;
  std::string lower = util::lower_ascii(word);
  if (lower != word) {
    if (const Eigen::VectorXd* v = find(lower)) return *v;
  }
  if (oov_.kind == OovPolicy::Kind::Zero) return Eigen::VectorXd::Zero(dim_);
  // Hashed draw keyed by (word, seed): the same word maps to the same
  // vector on every call.
  std::mt19937_64 rng(util::mix64(util::fnv1a64(word) ^ util::mix64(oov_.seed)));
  std::uniform_real_distribution<double> dist(-1.0 / std::sqrt(double(dim_)),
                                              1.0 / std::sqrt(double(dim_)));
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = dist(rng);
  return v;
}

namespace {

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<int> expected_d, OovPolicy oov) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file: " + path);
  std::string line;
  size_t line_no = 0;
  int dim = expected_d.value_or(0);
  std::optional<EmbeddingTable> table;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> fields = util::split_ws(line);
    if (fields.empty()) continue;
    if (first_content_line && fields.size() == 2) {
      // `count dim` header
      long count = 0, d = 0;
      if (util::parse_int(fields[0], count) && util::parse_int(fields[1], d)) {
        if (d <= 0)
          throw Error(path + ":" + std::to_string(line_no) +
                      ": header dimension must be positive");
        if (expected_d && *expected_d != d)
          throw Error(path + ": header dimension " + std::to_string(d) +
                      " does not match expected " +
                      std::to_string(*expected_d));
        dim = static_cast<int>(d);
        first_content_line = false;
        continue;
      }
    }
    first_content_line = false;
    if (fields.size() < 2)
      throw Error(path + ":" + std::to_string(line_no) +
                  ": row has no vector components");
    int row_dim = static_cast<int>(fields.size()) - 1;
    if (dim == 0) dim = row_dim;
    if (row_dim != dim)
      throw Error(path + ":" + std::to_string(line_no) + ": ragged row (" +
                  std::to_string(row_dim) + " components, expected " +
                  std::to_string(dim) + ")");
    if (!table) table.emplace(dim, oov);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      double x = 0;
      if (!parse_double(fields[i + 1], x))
        throw Error(path + ":" + std::to_string(line_no) +
                    ": non-numeric component '" + fields[i + 1] + "'");
      if (!std::isfinite(x))
        throw Error(path + ":" + std::to_string(line_no) +
                    ": non-finite component");
      v[i] = x;
    }
    table->insert(fields[0], std::move(v));
  }
  if (!table) {
    if (dim == 0) throw Error(path + ": no vectors and no dimension header");
    table.emplace(dim, oov);
  }
  return std::move(*table);
}

Eigen::MatrixXd embed_sentence(const std::vector<std::string>& tokens,
                               const EmbeddingTable& table) {
  if (tokens.empty()) throw Error("cannot embed an empty token sequence");
  Eigen::MatrixXd m(static_cast<int>(tokens.size()), table.dim());
  for (size_t t = 0; t < tokens.size(); ++t)
    m.row(static_cast<int>(t)) = table.vector_for(tokens[t]).transpose();
  return m;
}

std::vector<std::string> embedding_tokens(const AnnotatedSentence& sentence) {
  if (sentence.annotated()) {
    std::vector<std::string> out;
    out.reserve(sentence.tokens.size());
    for (const Token& t : sentence.tokens) out.push_back(t.surface);
    return out;
  }
  return util::split_ws(sentence.text);
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) +
                " vs " + std::to_string(v.size()) + ")");
  double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error("cosine undefined for zero vector");
  double c = u.dot(v) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

PrecomputedStore::PrecomputedStore(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open precomputed matrices file: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("pair_id") || !j.contains("side") || !j.contains("matrix"))
      throw Error(path + ":" + std::to_string(line_no) +
                  ": record needs pair_id, side, matrix");
    std::string side = j["side"].get<std::string>();
    if (side != "original" && side != "revised")
      throw Error(path + ":" + std::to_string(line_no) +
                  ": side must be 'original' or 'revised'");
    const auto& rows = j["matrix"];
    if (!rows.is_array() || rows.empty())
      throw Error(path + ":" + std::to_string(line_no) +
                  ": matrix must be a nonempty array of rows");
    int t_len = static_cast<int>(rows.size());
    int d = static_cast<int>(rows[0].size());
    Eigen::MatrixXd m(t_len, d);
    for (int r = 0; r < t_len; ++r) {
      if (static_cast<int>(rows[r].size()) != d)
        throw Error(path + ":" + std::to_string(line_no) + ": ragged matrix");
      for (int c = 0; c < d; ++c) m(r, c) = rows[r][c].get<double>();
    }
    if (!m.allFinite())
      throw Error(path + ":" + std::to_string(line_no) +
                  ": non-finite matrix entry");
    matrices_[j["pair_id"].get<std::string>() + "\t" + side] = std::move(m);
  }
}

const Eigen::MatrixXd* PrecomputedStore::find(const std::string& pair_id,
                                              const std::string& side) const {
  auto it = matrices_.find(pair_id + "\t" + side);
  return it == matrices_.end() ? nullptr : &it->second;
}

}  // namespace revmine
