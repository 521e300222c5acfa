// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset construction: instruction-tuning conversations, the left/right and
// above/below benchmark, object-presence questions, pseudo-caption ingestion,
// panoptic label grids and static-object tracks from video detections.
//
// Every builder is deterministic under its seed and returns records in a
// canonical order (image_id, then ordinal) regardless of `jobs`.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spatialift/coord_codec.hpp"
#include "spatialift/geometry.hpp"
#include "spatialift/prompt_engine.hpp"

namespace spatialift {

struct AnnotatedObject {
  std::string instance_id;
  std::string category;
  BBox bbox;
};

struct AnnotatedImage {
  std::string image_id;
  ImageDims dims;
  std::string file_name;
  std::vector<AnnotatedObject> objects;
  std::map<std::string, std::string> captions;  // instance_id -> pseudo-caption
};

// Per-filter exclusion tallies. Merging is associative and commutative.
struct BuildReport {
  std::size_t input_count = 0;
  std::size_t emitted_count = 0;
  std::map<std::string, std::size_t> exclusions;
  std::map<std::string, std::string> notes;

  void tally(const std::string& key, std::size_t n = 1) { exclusions[key] += n; }
  void merge(const BuildReport& other);
};

// Orders ids numerically when both are digit strings, lexically otherwise.
bool image_id_less(std::string_view a, std::string_view b);
void sort_canonical(std::vector<AnnotatedImage>& images);

// ---------------------------------------------------------------------------
// Unique instances and negatives

struct UniqueInstance {
  std::size_t image_index = 0;
  std::size_t object_index = 0;
  std::string category;
};

// (image, category) pairs where the image holds exactly one instance of the
// category. Objects whose box is invalid for the image are skipped and tallied
// as "malformed_annotation".
std::vector<UniqueInstance> filter_unique_instances(const std::vector<AnnotatedImage>& images,
                                                    BuildReport* report = nullptr);

// Vocabulary minus categories present in the image, in vocabulary order.
std::vector<std::string> discover_negative_categories(const AnnotatedImage& image,
                                                      const std::vector<std::string>& vocabulary);

// ---------------------------------------------------------------------------
// Instruction fine-tuning conversations

struct ObjectiveMix {
  double locpred = 1.0;
  double negpred = 1.0;
  double revloc = 1.0;
};

struct IftConfig {
  ReprScheme scheme = ReprScheme::nfp();
  LocationForm form = LocationForm::BBox;
  ObjectiveMix mix;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;  // candidate negative categories
  int jobs = 1;
};

struct ConversationSample {
  std::string sample_id;
  std::string image_id;
  Objective objective = Objective::LocPred;
  std::string prompt;
  std::string target;
  std::optional<LocationText> location;
  ReprScheme scheme = ReprScheme::nfp();
  LocationForm form = LocationForm::BBox;
  std::string descriptor;
  std::uint64_t seed = 0;
};

// Number of samples objective k receives out of `pairs` eligible pairs.
std::size_t mix_quota(double weight, double max_weight, std::size_t pairs);

std::vector<ConversationSample> build_ift_dataset(const std::vector<AnnotatedImage>& images,
                                                  const IftConfig& cfg, const PromptEngine& engine,
                                                  BuildReport* report = nullptr);

// Recomputes prompt/target from the sample's metadata alone.
RenderedPair rerender(const ConversationSample& s, const PromptEngine& engine);

// ---------------------------------------------------------------------------
// Spatial-reasoning benchmark

struct SpatialObject {
  std::string name;
  std::string instance_id;
  BBox bbox;
};

struct SpatialBenchItem {
  std::string item_id;
  std::string image_id;
  ImageDims dims;
  Axis axis = Axis::LR;
  Objective objective = Objective::SpatialDirect;  // or SpatialICL
  SpatialObject query;                             // obj_2 in the question
  SpatialObject ref;                               // obj_1 in the question
  Side gt_keyword = Side::Left;
  std::optional<std::array<PromptEngine::QA, 2>> icl_context;
  std::string prompt;
  std::uint64_t seed = 0;
};

// Position of `query` relative to `ref` along the axis, from box centres.
Side relative_side(const BBox& query, const BBox& ref, Axis axis);
// True when the centre lies in the closed central band [0.4, 0.6] * dim.
bool in_central_band(const BBox& b, const ImageDims& dims, Axis axis);
// Which half of the image the centre lies in (Left/Right or Above/Below).
Side half_of(const BBox& b, const ImageDims& dims, Axis axis);

struct SpatialBenchConfig {
  std::uint64_t seed = 0;
  std::vector<Axis> axes{Axis::LR, Axis::AB};
  bool icl = true;
  int jobs = 1;
};

std::vector<SpatialBenchItem> build_spatial_bench(const std::vector<AnnotatedImage>& images,
                                                  const SpatialBenchConfig& cfg,
                                                  const PromptEngine& engine,
                                                  BuildReport* report = nullptr);

// ---------------------------------------------------------------------------
// Object-presence (hallucination) questions

struct MediaCategories {
  std::string media_id;
  Medium medium = Medium::Image;
  std::vector<std::string> categories;
};

std::vector<MediaCategories> media_from_images(const std::vector<AnnotatedImage>& images);

struct HallucinationConfig {
  std::vector<std::string> vocabulary;
  std::size_t present_per_media = 2;
  std::size_t absent_per_media = 2;
  std::uint64_t seed = 0;
  // Novel-category mode: `vocabulary` must not overlap `reference_classes`.
  bool novel = false;
  std::vector<std::string> reference_classes;
};

struct HallucinationItem {
  std::string item_id;
  std::string media_id;
  Medium medium = Medium::Image;
  std::string obj;
  Polarity gt = Polarity::No;
  std::string prompt;
  std::uint64_t seed = 0;
};

// "a dog", "an apple".
std::string with_article(std::string_view noun);

std::vector<HallucinationItem> build_hallucination_set(const std::vector<MediaCategories>& media,
                                                       const HallucinationConfig& cfg,
                                                       const PromptEngine& engine,
                                                       BuildReport* report = nullptr);

// ---------------------------------------------------------------------------
// Pseudo-captions

struct CaptionRecord {
  std::string image_id;
  std::string instance_id;
  std::string caption;
};

// Keeps images with at most one instance per category, then attaches
// captions. Records for filtered-out images are tallied as "filtered_image";
// dangling records are tallied, never fatal.
std::vector<AnnotatedImage> ingest_pseudo_captions(const std::vector<AnnotatedImage>& images,
                                                   const std::vector<CaptionRecord>& records,
                                                   BuildReport* report = nullptr);

// True when every category in the image has at most one instance.
bool has_unique_categories(const AnnotatedImage& image);

// ---------------------------------------------------------------------------
// Panoptic label grids

struct LabelGrid {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> labels;  // row-major instance ids, 0 = void

  std::int64_t at(int r, int c) const { return labels[static_cast<std::size_t>(r) * cols + c]; }
};

struct PanopticBox {
  std::int64_t instance_id = 0;
  std::string category;
  BBox bbox;  // inclusive pixel extents (col_min, row_min, col_max, row_max)
  std::size_t pixels = 0;
};

struct PanopticResult {
  std::vector<PanopticBox> boxes;  // sorted by instance id
  std::set<std::string> present_categories;
  std::size_t dropped = 0;
};

PanopticResult panoptic_to_bboxes(const LabelGrid& grid,
                                  const std::map<std::int64_t, std::string>& category_map,
                                  std::size_t min_pixels = 10);

// ---------------------------------------------------------------------------
// Video static objects

struct Detection {
  std::string category;
  BBox bbox;
};

struct VideoDetections {
  std::string video_id;
  ImageDims dims;
  std::map<int, std::vector<Detection>> frames;
};

struct VideoObjectTrack {
  std::string video_id;
  std::string category;
  std::map<int, BBox> per_frame_boxes;
  BBox averaged_box;
  bool is_static = false;
};

std::vector<VideoObjectTrack> build_video_static_objects(const VideoDetections& video,
                                                         int num_frames = 8,
                                                         double static_radius = 5.0,
                                                         BuildReport* report = nullptr);

// ---------------------------------------------------------------------------
// Corpus keyword statistics

struct KeywordStat {
  std::size_t count = 0;
  double fraction = 0.0;
};

// Case-insensitive substring presence per conversation, in phrase order.
std::vector<std::pair<std::string, KeywordStat>> corpus_keyword_stats(
    const std::vector<std::string>& conversations, const std::vector<std::string>& phrases);

}  // namespace spatialift
