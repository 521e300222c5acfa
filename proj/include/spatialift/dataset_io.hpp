// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

// File formats: COCO-style annotations, line-delimited record files,
// response files, build reports and SHA-256 digests.
//
// Readers throw IoError when a file cannot be opened and SchemaError, citing
// the file and line, when a record does not follow its schema.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spatialift/dataset_builder.hpp"
#include "spatialift/eval_harness.hpp"
#include "spatialift/model_gateway.hpp"

namespace spatialift::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames, so readers never see a
// partial file.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Annotations

struct CocoDataset {
  std::vector<AnnotatedImage> images;  // canonical order
  std::vector<std::string> vocabulary;  // category names by ascending id
  BuildReport report;                   // malformed annotations skipped
};

// bbox is [x, y, w, h]; converted to corners. Unknown image or category ids
// and non-positive sizes are tallied and skipped; missing top-level keys are
// a SchemaError.
CocoDataset parse_coco(std::string_view text, const std::string& source = "<memory>");
CocoDataset load_coco(const std::filesystem::path& path);
Json coco_to_json(const std::vector<AnnotatedImage>& images,
                  const std::vector<std::string>& vocabulary);

// {image_id, instance_id, caption} per line.
std::vector<CaptionRecord> load_caption_records(const std::filesystem::path& path);

// Text grid: "rows cols" then rows*cols integers.
LabelGrid parse_label_grid(std::string_view text, const std::string& source = "<memory>");
LabelGrid load_label_grid(const std::filesystem::path& path);
std::string label_grid_to_text(const LabelGrid& grid);
// {"<instance id>": "<category>", ...}
std::map<std::int64_t, std::string> load_category_sidecar(const std::filesystem::path& path);

// One video per line: {video_id, width, height,
//   frames: {"<index>": [{category, bbox: [x1, y1, x2, y2]}, ...]}}
std::vector<VideoDetections> load_video_detections(const std::filesystem::path& path);
Json video_to_json(const VideoDetections& v);

// One media unit per line: {media_id, medium, categories: [...]}
std::vector<MediaCategories> load_media_categories(const std::filesystem::path& path);

// Newline-separated category names, blank lines ignored.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Dataset records (one JSON object per line)

Json to_json(const ConversationSample& s);
Json to_json(const SpatialBenchItem& item);
Json to_json(const HallucinationItem& item);
Json to_json(const VideoObjectTrack& t);

ConversationSample conversation_from_json(const Json& j);
SpatialBenchItem spatial_item_from_json(const Json& j);
HallucinationItem hallucination_item_from_json(const Json& j);

// VQA and region-description records share the base layout; `target` holds
// the reference answer or caption.
struct ReferenceRecord {
  std::string sample_id;
  std::string image_id;
  Objective objective = Objective::VQA;  // VQA or CaptionRequest
  std::string prompt;
  std::string target;
  std::string descriptor;
};
Json to_json(const ReferenceRecord& r);
ReferenceRecord reference_from_json(const Json& j);

// One dump() per line, each followed by '\n'.
std::string to_jsonl(const std::vector<Json>& rows);
std::vector<Json> parse_jsonl(std::string_view text, const std::string& source = "<memory>");
std::vector<Json> load_jsonl(const std::filesystem::path& path);

// The id, prompt and media of a record of any family.
ModelRequest request_from_record(const Json& record);
// Ground truth for the oracle mock. NegPred records become absent locations.
GroundTruth ground_truth_from_record(const Json& record);

// Task family of a record by its objective; LocPred/NegPred/RevLoc records
// have none and raise SchemaError.
Task task_of_record(const Json& record);

// ---------------------------------------------------------------------------
// Responses

// {item_id, text} plus {status, error} for failures.
Json to_json(const ModelResponse& r);
ModelResponse response_from_json(const Json& j);
std::vector<ModelResponse> load_responses(const std::filesystem::path& path);
// Only successful responses; failures count as missing.
ResponseMap response_map(const std::vector<ModelResponse>& responses);

// ---------------------------------------------------------------------------
// Reports

Json to_json(const BuildReport& r);
Json to_json(const MetricsReport& r);
Json to_json(const EvalRecord& r);

}  // namespace spatialift::io
