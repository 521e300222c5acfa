// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatialift/dataset_builder.hpp"
#include "spatialift/model_gateway.hpp"
#include "spatialift/prompt_engine.hpp"

namespace spatialift {

enum class Task { Spatial, VQA, Hallucination, RegionDescription };
std::string to_string(Task t);
Task task_from_string(std::string_view s);

// Strict: gt keyword present and the opposing keyword absent.
// Containment: gt keyword present.
enum class SpatialMode { Strict, Containment };
std::string to_string(SpatialMode m);
SpatialMode spatial_mode_from_string(std::string_view s);

struct EvalRecord {
  std::string item_id;
  Task task = Task::Spatial;
  std::string gt;     // keyword, answer or reference caption
  std::string split;  // per-split key, e.g. "left"; empty when unused
  ParsedResponse prediction;
  std::optional<bool> correct;  // boolean tasks
  std::optional<double> score;  // METEOR
  bool missing = false;
};

struct EvalContext {
  std::string config_digest;
  std::string dataset_digest;
  std::map<std::string, std::string> flags;
};

struct MetricsReport {
  std::string task;
  std::size_t n = 0;
  std::size_t missing = 0;
  std::optional<double> accuracy;
  std::map<std::string, double> split_accuracy;
  std::map<std::string, std::size_t> split_counts;
  std::optional<double> precision, recall, f1, yes_ratio;
  std::optional<double> meteor_mean;
  std::map<std::string, std::string> meta;  // digests and variant flags
};

// response text by item id; ids absent from the map count as missing.
using ResponseMap = std::map<std::string, std::string>;

// Keyword decision used by score_spatial.
bool spatial_correct(std::string_view response, Side gt, SpatialMode mode);

// Lowercase, strip punctuation around words, collapse spacing.
std::string normalize_answer(std::string_view text);
// Normalised gt appears as a contiguous word sequence in the response.
bool vqa_correct(std::string_view response, std::string_view gt);

std::vector<EvalRecord> spatial_records(const std::vector<SpatialBenchItem>& items,
                                        const ResponseMap& responses,
                                        SpatialMode mode = SpatialMode::Strict);
std::vector<EvalRecord> vqa_records(const std::vector<VqaTruth>& gt, const ResponseMap& responses);
std::vector<EvalRecord> hallucination_records(const std::vector<HallucinationItem>& items,
                                              const ResponseMap& responses);
std::vector<EvalRecord> region_records(const std::vector<RegionTruth>& gt,
                                       const ResponseMap& responses);

MetricsReport score_spatial(const std::vector<SpatialBenchItem>& items, const ResponseMap& responses,
                            SpatialMode mode = SpatialMode::Strict, const EvalContext& ctx = {});
MetricsReport score_keyword_vqa(const std::vector<VqaTruth>& gt, const ResponseMap& responses,
                                const EvalContext& ctx = {});
MetricsReport score_hallucination(const std::vector<HallucinationItem>& items,
                                  const ResponseMap& responses, const EvalContext& ctx = {});
MetricsReport score_region_description(const std::vector<RegionTruth>& gt,
                                       const ResponseMap& responses, const EvalContext& ctx = {});

// Throws InvalidArgument on an empty or mixed-task record set. Output does
// not depend on record order.
MetricsReport aggregate_report(const std::vector<EvalRecord>& records, const EvalContext& ctx = {});

struct MeteorDetail {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0, recall = 0, fmean = 0, penalty = 0, score = 0;
};

// Lowercased word tokens used by METEOR (punctuation dropped).
std::vector<std::string> meteor_tokens(std::string_view text);

// Exact then Porter-stem unigram matching; each stage picks a maximum
// alignment with the fewest chunks. Fmean = 10PR/(R+9P),
// penalty = 0.5 (chunks/m)^3.
MeteorDetail meteor_detail(std::string_view reference, std::string_view hypothesis);
double score_meteor(std::string_view reference, std::string_view hypothesis);

inline constexpr std::string_view kMeteorVariant =
    "meteor-1.0 exact+porter-stem, alpha=0.9 beta=3 gamma=0.5, min-chunk alignment";
inline constexpr std::string_view kVqaNormalization =
    "lowercase; punctuation stripped from word edges; gt word sequence contained in response";

}  // namespace spatialift
