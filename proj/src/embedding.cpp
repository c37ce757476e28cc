#include "capscore/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "capscore/corpus.hpp"
#include "capscore/error.hpp"
#include "json.hpp"

namespace capscore {

const CaptionEmbedding& EmbeddingBundle::caption(const std::string& id) const {
  auto it = captions.find(id);
  if (it == captions.end()) throw IntegrityError("no embeddings for caption " + id);
  return it->second;
}

const Vector& EmbeddingBundle::image(const std::string& id) const {
  auto it = images.find(id);
  if (it == images.end()) throw IntegrityError("no embedding for image " + id);
  return it->second;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw UsageError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

SimilarityMatrix similarity_matrix(const LabeledVectors& candidate,
                                   const LabeledVectors& reference) {
  if (candidate.vectors.empty() || reference.vectors.empty())
    throw UsageError("similarity matrix: empty input");
  if (candidate.labels.size() != candidate.vectors.size() ||
      reference.labels.size() != reference.vectors.size())
    throw UsageError("similarity matrix: label count does not match vector count");
  SimilarityMatrix m{candidate.labels, reference.labels, {}};
  m.values.reserve(candidate.vectors.size() * reference.vectors.size());
  for (const auto& c : candidate.vectors)
    for (const auto& r : reference.vectors) m.values.push_back(cosine(c, r));
  return m;
}

namespace {

double token_weight(const TokenWeights* weights, const std::vector<std::string>& tokens,
                    std::size_t i) {
  if (weights == nullptr || i >= tokens.size()) return 1.0;
  auto it = weights->find(tokens[i]);
  return it == weights->end() ? 1.0 : it->second;
}

}  // namespace

BertScore greedy_match(const CaptionEmbedding& candidate, const CaptionEmbedding& reference,
                       const TokenWeights* weights) {
  const auto& cv = candidate.token_vectors;
  const auto& rv = reference.token_vectors;
  if (cv.empty() || rv.empty()) throw UsageError("BERTScore: caption without token vectors");

  std::vector<double> row_max(cv.size(), -2.0), col_max(rv.size(), -2.0);
  for (std::size_t i = 0; i < cv.size(); ++i) {
    for (std::size_t j = 0; j < rv.size(); ++j) {
      const double s = cosine(cv[i], rv[j]);
      row_max[i] = std::max(row_max[i], s);
      col_max[j] = std::max(col_max[j], s);
    }
  }
  auto weighted_mean = [weights](const std::vector<double>& best,
                                 const std::vector<std::string>& tokens) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) {
      const double w = token_weight(weights, tokens, i);
      num += w * best[i];
      den += w;
    }
    return den == 0.0 ? 0.0 : num / den;
  };
  BertScore out;
  out.precision = weighted_mean(row_max, candidate.tokens);
  out.recall = weighted_mean(col_max, reference.tokens);
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

BertScore bertscore(const std::string& candidate_id, std::span<const std::string> ref_ids,
                    const EmbeddingBundle& bundle, const TokenWeights* weights) {
  if (ref_ids.empty()) throw UsageError("BERTScore: no references");
  const CaptionEmbedding& cand = bundle.caption(candidate_id);
  BertScore best;
  bool first = true;
  for (const auto& id : ref_ids) {
    const BertScore s = greedy_match(cand, bundle.caption(id), weights);
    if (first || s.f1 > best.f1) best = s;
    first = false;
  }
  return best;
}

double harmonic_mean(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

double clipscore(const std::string& image_id, const std::string& candidate_id,
                 const EmbeddingBundle& bundle, double w) {
  const Vector& image = bundle.image(image_id);
  const Vector& text = bundle.caption(candidate_id).sentence_vector;
  return w * std::max(cosine(image, text), 0.0);
}

double clipscore_ref(const std::string& image_id, const std::string& candidate_id,
                     std::span<const std::string> ref_ids, const EmbeddingBundle& bundle,
                     double w) {
  if (ref_ids.empty()) throw UsageError("CLIPScore-ref: no references");
  const double image_term = clipscore(image_id, candidate_id, bundle, w);
  const Vector& cand = bundle.caption(candidate_id).sentence_vector;
  double ref_term = 0.0;
  for (const auto& id : ref_ids)
    ref_term = std::max(ref_term, cosine(cand, bundle.caption(id).sentence_vector));
  return harmonic_mean(image_term, ref_term);
}

namespace {

using nlohmann::json;

Vector read_vector(const json& value, std::size_t dim, const std::string& where) {
  if (!value.is_array()) throw ParseError(where + ": expected an array of numbers");
  if (value.size() != dim)
    throw IntegrityError(where + ": vector has " + std::to_string(value.size()) +
                         " components, expected " + std::to_string(dim));
  Vector v;
  v.reserve(dim);
  for (const auto& x : value) {
    if (!x.is_number()) throw ParseError(where + ": non-numeric component");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw IntegrityError(where + ": non-finite component");
    v.push_back(d);
  }
  return v;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

EmbeddingBundle parse_embeddings(std::string_view document) {
  EmbeddingBundle bundle;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start < document.size()) {
    std::size_t end = document.find('\n', start);
    const bool last_unterminated = end == std::string_view::npos;
    if (last_unterminated) end = document.size();
    std::string_view line = document.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::string where = "embeddings line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      if (last_unterminated) throw ParseError(where + ": truncated file");
      throw ParseError(where + ": malformed record at byte " + std::to_string(e.byte));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!record.is_object()) throw ParseError(where + ": expected an object");

    if (!have_header) {
      const json& dim = field(record, "dim", where);
      if (!dim.is_number_integer() || dim.get<long long>() <= 0)
        throw ParseError(where + ": 'dim' must be a positive integer");
      bundle.dim = static_cast<std::size_t>(dim.get<long long>());
      have_header = true;
      continue;
    }

    const json& kind = field(record, "kind", where);
    const json& id_value = field(record, "id", where);
    if (!kind.is_string() || !id_value.is_string())
      throw ParseError(where + ": 'kind' and 'id' must be strings");
    const std::string id = id_value.get<std::string>();
    const std::string rec = where + " (" + kind.get<std::string>() + " " + id + ")";

    if (kind == "caption") {
      CaptionEmbedding emb;
      const json& tokens = field(record, "tokens", rec);
      const json& vectors = field(record, "token_vectors", rec);
      if (!tokens.is_array() || !vectors.is_array())
        throw ParseError(rec + ": 'tokens' and 'token_vectors' must be arrays");
      for (const auto& t : tokens) {
        if (!t.is_string()) throw ParseError(rec + ": tokens must be strings");
        emb.tokens.push_back(t.get<std::string>());
      }
      if (vectors.size() != emb.tokens.size())
        throw IntegrityError(rec + ": " + std::to_string(vectors.size()) + " token vectors for " +
                             std::to_string(emb.tokens.size()) + " tokens");
      for (std::size_t i = 0; i < vectors.size(); ++i)
        emb.token_vectors.push_back(
            read_vector(vectors[i], bundle.dim, rec + " token_vectors[" + std::to_string(i) + "]"));
      emb.sentence_vector =
          read_vector(field(record, "sentence_vector", rec), bundle.dim, rec + " sentence_vector");
      if (!bundle.captions.emplace(id, std::move(emb)).second)
        throw IntegrityError(rec + ": duplicate caption id");
    } else if (kind == "image") {
      Vector v = read_vector(field(record, "vector", rec), bundle.dim, rec + " vector");
      if (!bundle.images.emplace(id, std::move(v)).second)
        throw IntegrityError(rec + ": duplicate image id");
    } else {
      throw ParseError(rec + ": unknown record kind");
    }
  }
  if (!have_header) throw ParseError("embeddings: missing {\"dim\": n} header");
  return bundle;
}

EmbeddingBundle load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

}  // namespace capscore
