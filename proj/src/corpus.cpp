#include "capscore/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "capscore/error.hpp"
#include "json.hpp"

namespace capscore {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json(std::string_view document, std::string_view what) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": malformed JSON at byte " + std::to_string(e.byte) +
                     ": " + e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

std::string id_to_string(const json& value, const std::string& where) {
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_string()) return value.get<std::string>();
  throw ParseError(where + ": id must be an integer or string");
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

void EvalCorpus::validate() const {
  std::unordered_set<std::string> seen_images;
  std::unordered_set<std::string> seen_ids;
  for (const auto& item : items) {
    if (!seen_images.insert(item.image_id).second)
      throw IntegrityError("duplicate image id " + item.image_id);
    if (item.references.refs.empty())
      throw IntegrityError("image " + item.image_id + " has no references");
    if (is_blank(item.candidate.text))
      throw IntegrityError("candidate for image " + item.image_id + " is empty");
    if (!seen_ids.insert(item.candidate.id).second)
      throw IntegrityError("duplicate caption id " + item.candidate.id);
    for (const auto& ref : item.references.refs) {
      if (ref.image_id != item.image_id)
        throw IntegrityError("reference " + ref.id + " belongs to image " + ref.image_id +
                             ", not " + item.image_id);
      if (is_blank(ref.text)) throw IntegrityError("reference " + ref.id + " is empty");
    }
  }
}

std::vector<ReferenceSet> parse_coco_annotations(std::string_view document) {
  const json root = parse_json(document, "annotations");
  const json& images = require(root, "images", "annotations");
  const json& annotations = require(root, "annotations", "annotations");
  if (!images.is_array() || !annotations.is_array())
    throw ParseError("annotations: 'images' and 'annotations' must be arrays");

  std::vector<ReferenceSet> out;
  std::unordered_map<std::string, std::size_t> slot;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    std::string id = id_to_string(require(images[i], "id", where), where);
    if (slot.contains(id)) throw IntegrityError(where + ": duplicate image id " + id);
    slot.emplace(id, out.size());
    out.push_back(ReferenceSet{std::move(id), {}});
  }

  std::unordered_set<std::string> caption_ids;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const json& record = annotations[i];
    Caption caption;
    caption.id = id_to_string(require(record, "id", where), where);
    caption.image_id = id_to_string(require(record, "image_id", where), where);
    const json& text = require(record, "caption", where);
    if (!text.is_string()) throw ParseError(where + ": caption must be a string");
    caption.text = text.get<std::string>();
    if (is_blank(caption.text)) throw IntegrityError(where + ": empty caption text");
    if (!caption_ids.insert(caption.id).second)
      throw IntegrityError(where + ": duplicate annotation id " + caption.id);
    auto it = slot.find(caption.image_id);
    if (it == slot.end())
      throw IntegrityError(where + ": image_id " + caption.image_id + " has no image record");
    out[it->second].refs.push_back(std::move(caption));
  }

  std::erase_if(out, [](const ReferenceSet& set) { return set.refs.empty(); });
  return out;
}

std::vector<ReferenceSet> load_coco_annotations(const std::filesystem::path& path) {
  return parse_coco_annotations(read_file(path));
}

namespace {

// COCO ids are integers; keep them integral on output when they look like one.
ordered_json id_value(const std::string& id) {
  if (!id.empty() && id.size() < 19 &&
      std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isdigit(c); }))
    return std::stoll(id);
  return id;
}

}  // namespace

std::string serialize_coco_annotations(std::span<const ReferenceSet> refsets) {
  ordered_json images = ordered_json::array();
  ordered_json annotations = ordered_json::array();
  for (const auto& set : refsets) {
    images.push_back({{"id", id_value(set.image_id)}});
    for (const auto& ref : set.refs)
      annotations.push_back({{"id", id_value(ref.id)},
                             {"image_id", id_value(set.image_id)},
                             {"caption", ref.text}});
  }
  ordered_json root;
  root["images"] = std::move(images);
  root["annotations"] = std::move(annotations);
  return root.dump(1) + "\n";
}

SplitCorpus split_references(std::span<const ReferenceSet> refsets) {
  SplitCorpus split;
  split.human_candidates.reserve(refsets.size());
  split.reference_sets.reserve(refsets.size());
  for (const auto& set : refsets) {
    if (set.refs.size() < 1 + kSplitReferenceCount)
      throw IntegrityError("image " + set.image_id + " has " + std::to_string(set.refs.size()) +
                           " captions; the split needs at least 5");
    split.human_candidates.push_back(set.refs.front());
    ReferenceSet rest{set.image_id, {}};
    rest.refs.assign(set.refs.begin() + 1, set.refs.begin() + 1 + kSplitReferenceCount);
    split.reference_sets.push_back(std::move(rest));
  }
  return split;
}

std::vector<Caption> parse_candidates(std::string_view document, const std::string& id_prefix) {
  const json root = parse_json(document, "candidates");
  if (!root.is_array()) throw ParseError("candidates: expected a top-level array");
  std::vector<Caption> out;
  out.reserve(root.size());
  std::unordered_set<std::string> images;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string where = "candidates[" + std::to_string(i) + "]";
    Caption caption;
    caption.image_id = id_to_string(require(root[i], "image_id", where), where);
    const json& text = require(root[i], "caption", where);
    if (!text.is_string()) throw ParseError(where + ": caption must be a string");
    caption.text = text.get<std::string>();
    if (is_blank(caption.text)) throw IntegrityError(where + ": empty caption text");
    if (auto it = root[i].find("id"); it != root[i].end())
      caption.id = id_to_string(*it, where);
    else
      caption.id = id_prefix + caption.image_id;
    if (!images.insert(caption.image_id).second)
      throw IntegrityError(where + ": duplicate image_id " + caption.image_id);
    if (!ids.insert(caption.id).second)
      throw IntegrityError(where + ": duplicate caption id " + caption.id);
    out.push_back(std::move(caption));
  }
  return out;
}

std::vector<Caption> load_candidate_file(const std::filesystem::path& path,
                                         const std::string& id_prefix) {
  return parse_candidates(read_file(path), id_prefix);
}

std::string serialize_candidates(std::span<const Caption> captions) {
  ordered_json root = ordered_json::array();
  for (const auto& c : captions)
    root.push_back({{"image_id", id_value(c.image_id)}, {"caption", c.text}, {"id", c.id}});
  return root.dump(1) + "\n";
}

ExternalScores parse_external_scores(std::string_view document,
                                     std::span<const std::string> expected_ids) {
  const json root = parse_json(document, "external scores");
  const json& metric = require(root, "metric", "external scores");
  const json& scores = require(root, "scores", "external scores");
  if (!metric.is_string()) throw ParseError("external scores: 'metric' must be a string");
  if (!scores.is_object()) throw ParseError("external scores: 'scores' must be an object");

  ExternalScores out;
  out.metric = metric.get<std::string>();
  // nlohmann collapses duplicate keys, so duplicates are detected with a SAX pass.
  {
    struct DuplicateFinder : nlohmann::json_sax<json> {
      int depth = 0;
      bool in_scores = false;
      std::set<std::string> seen;
      std::string duplicate;
      bool null() override { return true; }
      bool boolean(bool) override { return true; }
      bool number_integer(number_integer_t) override { return true; }
      bool number_unsigned(number_unsigned_t) override { return true; }
      bool number_float(number_float_t, const string_t&) override { return true; }
      bool string(string_t&) override { return true; }
      bool binary(binary_t&) override { return true; }
      bool start_object(std::size_t) override {
        ++depth;
        return true;
      }
      bool end_object() override {
        if (depth == 2) in_scores = false;
        --depth;
        return true;
      }
      bool start_array(std::size_t) override {
        ++depth;
        return true;
      }
      bool end_array() override {
        --depth;
        return true;
      }
      bool key(string_t& k) override {
        if (depth == 1) in_scores = (k == "scores");
        if (depth == 2 && in_scores && !seen.insert(k).second && duplicate.empty()) duplicate = k;
        return true;
      }
      bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
        return false;
      }
    } finder;
    json::sax_parse(document.begin(), document.end(), &finder);
    if (!finder.duplicate.empty())
      throw IntegrityError("external scores: duplicate id " + finder.duplicate);
  }
  for (const auto& [id, value] : scores.items()) {
    if (!value.is_number()) throw ParseError("external scores: score for " + id + " is not a number");
    const double score = value.get<double>();
    if (!std::isfinite(score)) throw IntegrityError("external scores: non-finite score for " + id);
    out.scores.emplace(id, score);
  }
  for (const auto& id : expected_ids)
    if (!out.scores.contains(id)) throw IntegrityError("external scores: missing id " + id);
  return out;
}

ExternalScores load_external_scores(const std::filesystem::path& path,
                                    std::span<const std::string> expected_ids) {
  return parse_external_scores(read_file(path), expected_ids);
}

EvalCorpus make_eval_corpus(std::span<const Caption> candidates,
                            std::span<const ReferenceSet> refsets) {
  std::unordered_map<std::string, const ReferenceSet*> by_image;
  for (const auto& set : refsets) by_image.emplace(set.image_id, &set);
  EvalCorpus corpus;
  corpus.items.reserve(candidates.size());
  for (const auto& cand : candidates) {
    auto it = by_image.find(cand.image_id);
    if (it == by_image.end())
      throw IntegrityError("candidate " + cand.id + ": no references for image " + cand.image_id);
    corpus.items.push_back(EvalItem{cand.image_id, cand, *it->second});
  }
  corpus.validate();
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace capscore
