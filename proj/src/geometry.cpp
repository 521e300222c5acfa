// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/geometry.hpp"

#include <cmath>
#include <sstream>

#include "spatialift/errors.hpp"

namespace spatialift {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const ImageDims& dims) {
  if (dims.width <= 0 || dims.height <= 0) {
    throw InvalidArgument("image dims must be positive, got " + std::to_string(dims.width) + "x" +
                          std::to_string(dims.height));
  }
}

void validate(const BBox& b) {
  if (!finite_nonneg(b.x1) || !finite_nonneg(b.y1) || !finite_nonneg(b.x2) ||
      !finite_nonneg(b.y2)) {
    throw InvalidArgument("bbox coordinates must be finite and non-negative: " + to_string(b));
  }
  if (b.x1 > b.x2) throw InvalidArgument("x1 > x2 in bbox " + to_string(b));
  if (b.y1 > b.y2) throw InvalidArgument("y1 > y2 in bbox " + to_string(b));
}

void validate(const BBox& b, const ImageDims& dims) {
  validate(dims);
  validate(b);
  if (b.x2 > dims.width || b.y2 > dims.height) {
    throw InvalidArgument("bbox " + to_string(b) + " exceeds image " +
                          std::to_string(dims.width) + "x" + std::to_string(dims.height));
  }
}

void validate(const PointLoc& p, const ImageDims& dims) {
  validate(dims);
  if (!finite_nonneg(p.cx) || !finite_nonneg(p.cy) || p.cx > dims.width ||
      p.cy > dims.height) {
    std::ostringstream os;
    os << "point (" << p.cx << ", " << p.cy << ") outside image " << dims.width << "x"
       << dims.height;
    throw InvalidArgument(os.str());
  }
}

BBox bbox_from_xywh(double x, double y, double w, double h) {
  if (w < 0 || h < 0) throw InvalidArgument("negative bbox width/height");
  return {x, y, x + w, y + h};
}

std::string to_string(const BBox& b) {
  std::ostringstream os;
  os << "[" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << "]";
  return os.str();
}

}  // namespace spatialift
