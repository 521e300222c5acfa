// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

// Textual coordinate representations for object locations.
//
// Three schemes are supported:
//   NFP  - coordinates normalised by the image side, fixed decimals.
//   IVB  - integer bins 0..n_b-1 per axis.
//   DIGA - index of the nearest anchor on a g x g grid of patch-sized cells
//          (in a g*patch square) plus integer pixel deviations from it.
//
// Encoders emit only the canonical form "(a, b, ...)". Decoders accept the
// canonical form and a lenient form (brackets optional, any whitespace).

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spatialift/geometry.hpp"

namespace spatialift {

enum class SchemeKind { NFP, IVB, DIGA };
enum class LocationForm { Point, BBox };

std::string to_string(SchemeKind k);
std::string to_string(LocationForm f);
SchemeKind scheme_kind_from_string(std::string_view s);
LocationForm location_form_from_string(std::string_view s);

class ReprScheme {
 public:
  static ReprScheme nfp(int decimals = 4);
  static ReprScheme ivb(int bins = 224);
  // grid = anchors per side (16 or 24 for 14 px patches).
  static ReprScheme diga(int grid = 16, int patch_size = 14);

  SchemeKind kind() const { return kind_; }
  int decimals() const { return decimals_; }
  int bins() const { return bins_; }
  int grid() const { return grid_; }
  int patch_size() const { return patch_; }
  // Side of the square DIGA works in (224 or 336).
  int square_side() const { return grid_ * patch_; }

  // Number of numeric fields in a tuple of the given form.
  std::size_t arity(LocationForm form) const;

  // Compact identifier, e.g. "nfp4", "ivb224", "diga16x14".
  std::string id() const;
  static ReprScheme from_id(std::string_view id);

  bool operator==(const ReprScheme&) const = default;

 private:
  ReprScheme() = default;
  SchemeKind kind_ = SchemeKind::NFP;
  int decimals_ = 4;
  int bins_ = 224;
  int grid_ = 16;
  int patch_ = 14;
};

struct LocationText {
  std::string text;
  ReprScheme scheme = ReprScheme::nfp();
  LocationForm form = LocationForm::BBox;

  bool operator==(const LocationText&) const = default;
};

enum class ParseMode { Canonical, Lenient };

LocationText encode_bbox(const BBox& b, const ImageDims& dims, const ReprScheme& scheme);
LocationText encode_point(const PointLoc& p, const ImageDims& dims, const ReprScheme& scheme);

// Parses the numeric fields of `text` under `scheme`/`form`, validating each
// token (range, integer-ness, anchor and bin limits). Throws ParseError.
std::vector<double> parse_location_fields(std::string_view text, const ReprScheme& scheme,
                                          LocationForm form,
                                          ParseMode mode = ParseMode::Lenient);

BBox decode_bbox(const LocationText& t, const ImageDims& dims);
PointLoc decode_point(const LocationText& t, const ImageDims& dims);

struct AnchorIndex {
  int p = 0;  // column (x)
  int q = 0;  // row (y)
  bool operator==(const AnchorIndex&) const = default;
};

AnchorIndex nearest_anchor(const PointLoc& p, const ImageDims& dims, const ReprScheme& scheme);
// Centre of anchor (p, q) in the DIGA square.
std::pair<double, double> anchor_center(const AnchorIndex& a, const ReprScheme& scheme);

// Worst-case per-coordinate round-trip error in pixels along an axis of
// length `dim`.
double quantization_error_bound(const ReprScheme& scheme, int dim);

// One token per digit, decimal point and sign character.
std::size_t numeric_token_cost(std::string_view number);

struct TokenCost {
  std::size_t coordinates = 0;  // numeric tokens
  std::size_t overhead = 0;     // brackets and separators
  std::vector<std::size_t> per_field;
};

TokenCost token_cost(const LocationText& t);

}  // namespace spatialift
