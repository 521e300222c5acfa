// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spatialift/coord_codec.hpp"

namespace spatialift {

enum class Objective {
  LocPred,
  NegPred,
  RevLoc,
  SpatialDirect,
  SpatialICL,
  Hallucination,
  CaptionRequest,
  VQA,
};

std::string to_string(Objective o);
Objective objective_from_string(std::string_view s);

enum class Axis { LR, AB };
enum class Side { Left, Right, Above, Below };
enum class Medium { Image, Video };
enum class Polarity { Yes, No };

std::string to_string(Axis a);
std::string to_string(Side s);
std::string to_string(Medium m);
std::string to_string(Polarity p);
Axis axis_from_string(std::string_view s);
Side side_from_string(std::string_view s);
Medium medium_from_string(std::string_view s);
Polarity polarity_from_string(std::string_view s);

// Side that is the opposite of `s` on the same axis.
Side opposite(Side s);

// Instruction templates. Placeholders use {name} syntax.
struct TemplateSet {
  std::vector<std::string> locpred_prompts;  // shared by LocPred and NegPred
  std::vector<std::string> revloc_prompts;
  std::string locpred_target;
  std::string negpred_target;
  std::string revloc_target;
  std::string spatial_direct;
  std::string spatial_icl_answer;
  std::string hallucination;
  std::string caption_request;
  // Set when loaded from an override file; recorded in dataset metadata.
  std::optional<std::filesystem::path> override_path;

  const std::vector<std::string>& negpred_prompts() const { return locpred_prompts; }

  static const TemplateSet& builtin();

  // Starts from the built-in set and replaces every section present in the
  // file. Sections: [locpred] [revloc] [locpred_target] [negpred_target]
  // [revloc_target] [spatial_direct] [spatial_icl_answer] [hallucination]
  // [caption_request]. Blank lines and lines starting with '#' are skipped.
  static TemplateSet load_override(const std::filesystem::path& path);
};

// "(x1,y1,x2,y2) bbox" or "(cx,cy) point".
std::string repr_placeholder(LocationForm form);

// Replaces {key} occurrences in a single pass; substituted text is never
// rescanned. Unknown placeholders are left untouched.
std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string_view, std::string_view>>& values);

struct RenderedPair {
  std::string prompt;
  std::string target;
  Objective objective = Objective::LocPred;
  std::size_t template_index = 0;
  std::uint64_t seed = 0;

  bool operator==(const RenderedPair&) const = default;
};

class PromptEngine {
 public:
  PromptEngine() : t_(TemplateSet::builtin()) {}
  explicit PromptEngine(TemplateSet templates);

  const TemplateSet& templates() const { return t_; }

  RenderedPair render_locpred(std::string_view descriptor, LocationForm form,
                              const LocationText& loc, std::uint64_t seed) const;
  RenderedPair render_negpred(std::string_view descriptor, LocationForm form,
                              std::uint64_t seed) const;
  RenderedPair render_revloc(const LocationText& loc, std::string_view descriptor,
                             std::uint64_t seed) const;

  using QA = std::pair<std::string, std::string>;
  // Question asks for the position of obj2 relative to obj1.
  std::string render_spatial_query(std::string_view obj1, std::string_view obj2, Axis axis,
                                   const std::optional<std::array<QA, 2>>& icl = std::nullopt) const;
  // In-context example answer: "The {first} is located to the {side} of {second}."
  std::string render_spatial_answer(std::string_view first, Side side,
                                    std::string_view second) const;
  std::string render_hallucination_query(std::string_view obj, Medium medium) const;
  std::string render_caption_request(std::string_view category) const;

 private:
  TemplateSet t_;
};

enum class ResponseKind { Location, Negative, SideAnswer, YesNo, FreeText };
std::string to_string(ResponseKind k);
ResponseKind response_kind_from_string(std::string_view s);

struct ParsedResponse {
  ResponseKind kind = ResponseKind::FreeText;
  std::optional<LocationText> location;
  std::optional<Side> side;
  std::optional<Polarity> polarity;
  std::string raw;
};

// Lowercased word tokens (letters and digits), used for keyword matching.
std::vector<std::string> word_tokens(std::string_view text);
bool contains_word(std::string_view text, std::string_view word);

// Finds the first run of `arity` comma-separated numbers that parses under
// the scheme, e.g. inside "It is located at [4, 52, 13, 63]."
std::optional<LocationText> find_location(std::string_view text, const ReprScheme& scheme,
                                          LocationForm form);

// Never throws; unrecognised content comes back as FreeText.
ParsedResponse parse_response(std::string_view raw, Objective expect, const ReprScheme& scheme,
                              LocationForm form);

}  // namespace spatialift
