// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace spatialift {

struct ImageDims {
  int width = 0;
  int height = 0;

  bool operator==(const ImageDims&) const = default;
};

// Axis-aligned box in absolute pixel coordinates, (x1, y1) top-left.
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
  bool operator==(const BBox&) const = default;
};

struct PointLoc {
  double cx = 0, cy = 0;

  bool operator==(const PointLoc&) const = default;
};

inline PointLoc center_of(const BBox& b) { return {b.cx(), b.cy()}; }

// Throws InvalidArgument unless width > 0 and height > 0.
void validate(const ImageDims& dims);
// Throws InvalidArgument with a message naming the violated invariant.
void validate(const BBox& b);
void validate(const BBox& b, const ImageDims& dims);
void validate(const PointLoc& p, const ImageDims& dims);

// COCO boxes are [x, y, w, h].
BBox bbox_from_xywh(double x, double y, double w, double h);

std::string to_string(const BBox& b);

}  // namespace spatialift
