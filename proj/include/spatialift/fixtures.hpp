// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic synthetic inputs used by the tests, the acceptance runner and
// `spatialift fixtures`. Nothing here reads the network or external data.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spatialift/dataset_builder.hpp"
#include "spatialift/dataset_io.hpp"

namespace spatialift::fixtures {

// The 80 COCO detection category names in category-id order.
const std::vector<std::string>& coco80();

struct SyntheticCocoOptions {
  std::size_t images = 50;
  std::uint64_t seed = 1;
  std::size_t vocabulary_size = 12;  // first N of coco80()
  int min_objects = 1;
  int max_objects = 6;
  double duplicate_rate = 0.2;  // chance an object reuses a category
  double band_rate = 0.1;       // chance a centre is snapped into the central band
};

struct SyntheticCoco {
  std::vector<AnnotatedImage> images;  // canonical order
  std::vector<std::string> vocabulary;
};

SyntheticCoco synthetic_coco(const SyntheticCocoOptions& opts);

// Label grids with several rectangular and scattered instances each, and the
// instance -> category sidecar.
struct PanopticFixture {
  LabelGrid grid;
  std::map<std::int64_t, std::string> categories;
};
std::vector<PanopticFixture> fuzzed_masks(std::size_t count, std::uint64_t seed);

// 95 images with 400 caption records, some dangling or duplicated.
struct CaptionFixture {
  std::vector<AnnotatedImage> images;
  std::vector<std::string> vocabulary;
  std::vector<CaptionRecord> records;
};
CaptionFixture caption_fixture(std::uint64_t seed = 3);

// Media units with at least two present categories; with 2+2 questions per
// unit the set is exactly balanced.
std::vector<MediaCategories> balanced_media(std::size_t units, std::uint64_t seed);

std::vector<io::ReferenceRecord> vqa_fixture(std::size_t n, std::uint64_t seed);
std::vector<io::ReferenceRecord> region_fixture(std::size_t n, std::uint64_t seed);

std::vector<VideoDetections> video_fixture(std::size_t videos, std::uint64_t seed);

// 80,000 conversations whose left/right phrase counts are fixed.
std::vector<std::string> keyword_corpus(std::uint64_t seed = 11);
// Phrases and the conversation counts keyword_corpus() carries for them.
const std::vector<std::pair<std::string, std::size_t>>& keyword_corpus_counts();

struct GoldenVector {
  std::string name;
  std::string scheme_id;
  LocationForm form;
  BBox box;         // used when form == BBox
  PointLoc point;   // used when form == Point
  ImageDims dims;
  std::string expected;
};
// Worked encodings of the cat box (10, 120, 30, 145) and its centre
// (20, 132.5) in a 512 x 512 image.
const std::vector<GoldenVector>& golden_vectors();

}  // namespace spatialift::fixtures
