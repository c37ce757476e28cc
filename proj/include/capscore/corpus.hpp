#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace capscore {

struct Caption {
  std::string id;
  std::string image_id;
  std::string text;

  bool operator==(const Caption&) const = default;
};

/// All reference captions of one image, in annotation-file order.
struct ReferenceSet {
  std::string image_id;
  std::vector<Caption> refs;

  bool operator==(const ReferenceSet&) const = default;
};

struct EvalItem {
  std::string image_id;
  Caption candidate;
  ReferenceSet references;
};

struct EvalCorpus {
  std::vector<EvalItem> items;

  /// Throws IntegrityError on duplicate image ids, empty reference sets or
  /// blank caption text.
  void validate() const;
};

/// One human caption per image plus exactly four references.
struct SplitCorpus {
  std::vector<Caption> human_candidates;
  std::vector<ReferenceSet> reference_sets;
};

inline constexpr std::size_t kSplitReferenceCount = 4;

bool is_blank(std::string_view text);

std::vector<ReferenceSet> parse_coco_annotations(std::string_view document);
std::vector<ReferenceSet> load_coco_annotations(const std::filesystem::path& path);
std::string serialize_coco_annotations(std::span<const ReferenceSet> refsets);

/// First caption of each set becomes the human candidate, captions 2-5 the
/// references; anything past the fifth is dropped.
SplitCorpus split_references(std::span<const ReferenceSet> refsets);

/// Candidate records lacking an "id" get `id_prefix + image_id`.
std::vector<Caption> parse_candidates(std::string_view document, const std::string& id_prefix = {});
std::vector<Caption> load_candidate_file(const std::filesystem::path& path,
                                         const std::string& id_prefix = {});
std::string serialize_candidates(std::span<const Caption> captions);

struct ExternalScores {
  std::string metric;
  std::map<std::string, double> scores;
};

ExternalScores parse_external_scores(std::string_view document,
                                     std::span<const std::string> expected_ids);
ExternalScores load_external_scores(const std::filesystem::path& path,
                                    std::span<const std::string> expected_ids);

/// Pairs candidates with reference sets by image id. Throws IntegrityError
/// when a candidate has no references.
EvalCorpus make_eval_corpus(std::span<const Caption> candidates,
                            std::span<const ReferenceSet> refsets);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace capscore
