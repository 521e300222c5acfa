// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/fixtures.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "spatialift/prompt_engine.hpp"
#include "spatialift/rng.hpp"

namespace spatialift::fixtures {

const std::vector<std::string>& coco80() {
  static const std::vector<std::string> names = {
      "person",        "bicycle",      "car",           "motorcycle",    "airplane",
      "bus",           "train",        "truck",         "boat",          "traffic light",
      "fire hydrant",  "stop sign",    "parking meter", "bench",         "bird",
      "cat",           "dog",          "horse",         "sheep",         "cow",
      "elephant",      "bear",         "zebra",         "giraffe",       "backpack",
      "umbrella",      "handbag",      "tie",           "suitcase",      "frisbee",
      "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat",
      "baseball glove", "skateboard",  "surfboard",     "tennis racket", "bottle",
      "wine glass",    "cup",          "fork",          "knife",         "spoon",
      "bowl",          "banana",       "apple",         "sandwich",      "orange",
      "broccoli",      "carrot",       "hot dog",       "pizza",         "donut",
      "cake",          "chair",        "couch",         "potted plant",  "bed",
      "dining table",  "toilet",       "tv",            "laptop",        "mouse",
      "remote",        "keyboard",     "cell phone",    "microwave",     "oven",
      "toaster",       "sink",         "refrigerator",  "book",          "clock",
      "vase",          "scissors",     "teddy bear",    "hair drier",    "toothbrush"};
  return names;
}

namespace {

// Widths and heights divisible by 5 so band edges at 0.4 and 0.6 of the
// dimension are integers and centres can sit on them exactly.
constexpr std::array<ImageDims, 5> kDims{{{640, 480}, {480, 640}, {500, 375}, {320, 240}, {600, 400}}};

int uniform_int(SplitMix64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

template <typename T>
const T& pick(SplitMix64& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

// Centre along one axis: usually uniform, sometimes inside or on the edge
// of the central band.
int choose_centre(SplitMix64& rng, int dim, double band_rate) {
  if (rng.uniform() < band_rate) {
    switch (rng.below(4)) {
      case 0: return dim * 2 / 5;
      case 1: return dim * 3 / 5;
      case 2: return dim / 2;
      default: return uniform_int(rng, dim * 2 / 5, dim * 3 / 5);
    }
  }
  return uniform_int(rng, 2, dim - 2);
}

BBox box_around(SplitMix64& rng, int cx, int cy, const ImageDims& d) {
  const int max_hw = std::max(1, std::min({cx, d.width - cx, d.width / 8}));
  const int max_hh = std::max(1, std::min({cy, d.height - cy, d.height / 8}));
  const int hw = uniform_int(rng, 1, max_hw), hh = uniform_int(rng, 1, max_hh);
  return {static_cast<double>(cx - hw), static_cast<double>(cy - hh), static_cast<double>(cx + hw),
          static_cast<double>(cy + hh)};
}

}  // namespace

SyntheticCoco synthetic_coco(const SyntheticCocoOptions& opts) {
  if (opts.vocabulary_size == 0 || opts.vocabulary_size > coco80().size()) {
    throw std::invalid_argument("vocabulary_size must be in [1, 80]");
  }
  SyntheticCoco out;
  out.vocabulary.assign(coco80().begin(), coco80().begin() + static_cast<long>(opts.vocabulary_size));
  SplitMix64 rng(opts.seed);
  for (std::size_t i = 0; i < opts.images; ++i) {
    AnnotatedImage img;
    img.image_id = std::to_string(i + 1);
    img.dims = kDims[rng.below(kDims.size())];
    img.file_name = "synthetic_" + img.image_id + ".jpg";
    const int n = uniform_int(rng, opts.min_objects, opts.max_objects);
    for (int k = 0; k < n; ++k) {
      std::string cat;
      if (!img.objects.empty() && rng.uniform() < opts.duplicate_rate) {
        cat = pick(rng, img.objects).category;
      } else {
        cat = pick(rng, out.vocabulary);
      }
      const int cx = choose_centre(rng, img.dims.width, opts.band_rate);
      const int cy = choose_centre(rng, img.dims.height, opts.band_rate);
      img.objects.push_back(
          {std::to_string((i + 1) * 1000 + k), cat, box_around(rng, cx, cy, img.dims)});
    }
    out.images.push_back(std::move(img));
  }
  sort_canonical(out.images);
  return out;
}

std::vector<PanopticFixture> fuzzed_masks(std::size_t count, std::uint64_t seed) {
  std::vector<PanopticFixture> out;
  SplitMix64 rng(seed);
  for (std::size_t m = 0; m < count; ++m) {
    PanopticFixture f;
    f.grid.rows = uniform_int(rng, 1, 40);
    f.grid.cols = uniform_int(rng, 1, 40);
    f.grid.labels.assign(static_cast<std::size_t>(f.grid.rows) * f.grid.cols, 0);
    const int instances = uniform_int(rng, 0, 6);
    std::set<std::int64_t> ids;
    for (int k = 0; k < instances; ++k) {
      std::int64_t id;
      do {
        id = uniform_int(rng, 1, 999);
      } while (!ids.insert(id).second);
      f.categories[id] = pick(rng, coco80());
      if (rng.below(3) == 0) {
        // Scattered pixels.
        const int pixels = uniform_int(rng, 1, 30);
        for (int p = 0; p < pixels; ++p) {
          const int r = uniform_int(rng, 0, f.grid.rows - 1), c = uniform_int(rng, 0, f.grid.cols - 1);
          f.grid.labels[static_cast<std::size_t>(r) * f.grid.cols + c] = id;
        }
      } else {
        const int r0 = uniform_int(rng, 0, f.grid.rows - 1), c0 = uniform_int(rng, 0, f.grid.cols - 1);
        const int r1 = uniform_int(rng, r0, f.grid.rows - 1), c1 = uniform_int(rng, c0, f.grid.cols - 1);
        for (int r = r0; r <= r1; ++r) {
          for (int c = c0; c <= c1; ++c) f.grid.labels[static_cast<std::size_t>(r) * f.grid.cols + c] = id;
        }
      }
    }
    // An id known to the sidecar but absent from the grid.
    if (rng.below(4) == 0) f.categories[1000 + static_cast<std::int64_t>(m)] = pick(rng, coco80());
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

const std::vector<std::string>& adjectives() {
  static const std::vector<std::string> v = {"small", "large", "red", "blue", "wooden",
                                             "old", "shiny", "striped", "white", "dark"};
  return v;
}

const std::vector<std::string>& scenes() {
  static const std::vector<std::string> v = {
      "resting near a wall", "on a kitchen counter", "in a busy street", "beside a window",
      "on a grassy field", "under a table", "in front of a building", "next to a fence"};
  return v;
}

}  // namespace

CaptionFixture caption_fixture(std::uint64_t seed) {
  CaptionFixture f;
  SyntheticCocoOptions o;
  o.images = 95;
  o.seed = seed;
  o.duplicate_rate = 0.15;
  auto coco = synthetic_coco(o);
  f.images = std::move(coco.images);
  f.vocabulary = std::move(coco.vocabulary);
  SplitMix64 rng(seed ^ 0xC0FFEE);
  while (f.records.size() < 400) {
    const double u = rng.uniform();
    const auto& img = f.images[rng.below(f.images.size())];
    const auto& obj = img.objects[rng.below(img.objects.size())];
    const std::string caption =
        "a " + pick(rng, adjectives()) + " " + obj.category + " " + pick(rng, scenes());
    if (u < 0.05) {
      f.records.push_back({"missing_" + std::to_string(f.records.size()), obj.instance_id, caption});
    } else if (u < 0.10) {
      f.records.push_back({img.image_id, "unknown_" + std::to_string(f.records.size()), caption});
    } else if (u < 0.15 && !f.records.empty()) {
      auto dup = f.records[rng.below(f.records.size())];
      dup.caption = caption;
      f.records.push_back(dup);
    } else {
      f.records.push_back({img.image_id, obj.instance_id, caption});
    }
  }
  return f;
}

std::vector<MediaCategories> balanced_media(std::size_t units, std::uint64_t seed) {
  std::vector<MediaCategories> out;
  SplitMix64 rng(seed);
  const auto& vocab = coco80();
  for (std::size_t i = 0; i < units; ++i) {
    MediaCategories m;
    m.media_id = "m" + std::to_string(i + 1);
    m.medium = i % 2 ? Medium::Video : Medium::Image;
    const int n = uniform_int(rng, 2, 6);
    std::set<std::string> chosen;
    while (chosen.size() < static_cast<std::size_t>(n)) chosen.insert(pick(rng, vocab));
    m.categories.assign(chosen.begin(), chosen.end());
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<io::ReferenceRecord> vqa_fixture(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::pair<std::string, std::string>> qa = {
      {"How many dogs are in the picture?", "two"},
      {"What color is the bus?", "red"},
      {"What is the man holding?", "tennis racket"},
      {"What animal is on the couch?", "cat"},
      {"Is the light on?", "yes"},
      {"What is on the plate?", "pizza"},
      {"Where is the clock?", "on the wall"},
      {"What sport is being played?", "baseball"}};
  std::vector<io::ReferenceRecord> out;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [q, a] = qa[rng.below(qa.size())];
    io::ReferenceRecord r;
    r.sample_id = "vqa_" + std::to_string(i + 1);
    r.image_id = std::to_string(rng.below(5000) + 1);
    r.objective = Objective::VQA;
    r.prompt = q + " Answer the question using a single word or phrase.";
    r.target = a;
    r.descriptor = a;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<io::ReferenceRecord> region_fixture(std::size_t n, std::uint64_t seed) {
  std::vector<io::ReferenceRecord> out;
  SplitMix64 rng(seed);
  const PromptEngine engine;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cat = pick(rng, coco80());
    io::ReferenceRecord r;
    r.sample_id = "region_" + std::to_string(i + 1);
    r.image_id = std::to_string(rng.below(5000) + 1);
    r.objective = Objective::CaptionRequest;
    r.prompt = engine.render_caption_request(cat);
    r.target = "a " + pick(rng, adjectives()) + " " + cat + " " + pick(rng, scenes());
    r.descriptor = cat;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VideoDetections> video_fixture(std::size_t videos, std::uint64_t seed) {
  std::vector<VideoDetections> out;
  SplitMix64 rng(seed);
  for (std::size_t v = 0; v < videos; ++v) {
    VideoDetections vid;
    vid.video_id = "v" + std::to_string(v + 1);
    vid.dims = {640, 360};
    const int objects = uniform_int(rng, 1, 4);
    std::set<std::string> used;
    for (int k = 0; k < objects; ++k) {
      std::string cat;
      do {
        cat = pick(rng, coco80());
      } while (!used.insert(cat).second);
      const int kind = static_cast<int>(rng.below(4));  // static, moving, single frame, duplicated
      const double cx = uniform_int(rng, 100, 540), cy = uniform_int(rng, 80, 280);
      for (int f = 0; f < 8; ++f) {
        if (kind == 2 && f != 3) continue;
        double dx = 0, dy = 0;
        if (kind == 0) {
          dx = uniform_int(rng, -2, 2);
          dy = uniform_int(rng, -2, 2);
        } else if (kind == 1) {
          dx = 6.0 * f;
        }
        const BBox b{cx + dx - 20, cy + dy - 15, cx + dx + 20, cy + dy + 15};
        vid.frames[f].push_back({cat, b});
        if (kind == 3 && f == 5) vid.frames[f].push_back({cat, BBox{10, 10, 30, 30}});
      }
    }
    out.push_back(std::move(vid));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Keyword corpus

const std::vector<std::pair<std::string, std::size_t>>& keyword_corpus_counts() {
  static const std::vector<std::pair<std::string, std::size_t>> counts = {
      {"left", 1619},       {"right", 5001},      {"the left ", 171},  {"the right ", 1314},
      {"left side", 75},    {"right side", 110},  {"to the left", 80}, {"to the right", 93}};
  return counts;
}

namespace {

const std::vector<std::string>& neutral_bank() {
  static const std::vector<std::string> v = {
      "Human: What is the man holding? GPT: The man is holding a red umbrella.",
      "Human: How many people are in the image? GPT: There are three people standing together.",
      "Human: What color is the bus? GPT: The bus is painted yellow with blue stripes.",
      "Human: What is on the table? GPT: A plate of food and a glass of water sit on the table.",
      "Human: Describe the scene. GPT: A dog runs across a sandy beach near the water.",
      "Human: What is the weather like? GPT: The sky is cloudy and it looks cold outside.",
      "Human: What are the children doing? GPT: The children are playing with a kite in a park.",
      "Human: Is there a cat in the picture? GPT: Yes, a cat is sleeping on the sofa."};
  return v;
}

std::string pick_text(SplitMix64& rng, const std::vector<std::string>& v) { return v[rng.below(v.size())]; }

}  // namespace

std::vector<std::string> keyword_corpus(std::uint64_t seed) {
  static const std::vector<std::string> to_the_left = {
      "Human: Where is the cup? GPT: The cup is to the left of the plate.",
      "Human: Where is the bicycle parked? GPT: It stands to the left of the door."};
  static const std::vector<std::string> the_left = {
      "Human: Which hand holds the phone? GPT: She holds it in the left hand.",
      "Human: Which lane is the car in? GPT: The car drives in the left lane."};
  static const std::vector<std::string> left_side = {
      "Human: What is visible? GPT: A left side mirror of a truck is visible.",
      "Human: What does the photo show? GPT: It shows a left side view of a horse."};
  static const std::vector<std::string> left_plain = {
      "Human: What happened to the train? GPT: The train left the station a moment ago.",
      "Human: Is there any food? GPT: Only a little cake is left on the plate."};
  static const std::vector<std::string> to_the_right = {
      "Human: Where is the lamp? GPT: The lamp is to the right of the bed.",
      "Human: Where is the dog sitting? GPT: The dog sits to the right of the boy."};
  static const std::vector<std::string> the_right = {
      "Human: Is this the correct answer? GPT: Yes, that is the right answer.",
      "Human: Which arm is raised? GPT: The man raises the right arm."};
  static const std::vector<std::string> right_side = {
      "Human: What is visible? GPT: A right side view of a red car is visible.",
      "Human: What does the photo show? GPT: It shows a right side panel of a bus."};
  static const std::vector<std::string> right_plain = {
      "Human: Is the skier moving fast? GPT: Right, the skier is moving very fast.",
      "Human: Is he eating now? GPT: He is eating a sandwich right now."};

  const std::size_t total = 80000;
  std::vector<std::pair<const std::vector<std::string>*, std::size_t>> plan = {
      {&to_the_left, 80}, {&the_left, 91},      {&left_side, 75},  {&left_plain, 1373},
      {&to_the_right, 93}, {&the_right, 1221},  {&right_side, 110}, {&right_plain, 3577}};
  SplitMix64 rng(seed);
  std::vector<std::string> out;
  out.reserve(total);
  for (const auto& [bank, n] : plan) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(pick_text(rng, *bank));
  }
  while (out.size() < total) out.push_back(pick_text(rng, neutral_bank()));
  for (std::size_t i = out.size() - 1; i > 0; --i) std::swap(out[i], out[rng.below(i + 1)]);
  return out;
}

// ---------------------------------------------------------------------------
// Golden vectors

const std::vector<GoldenVector>& golden_vectors() {
  static const std::vector<GoldenVector> v = [] {
    const BBox cat{10, 120, 30, 145};
    const PointLoc centre{20, 132.5};
    const ImageDims dims{512, 512};
    return std::vector<GoldenVector>{
        {"bbox nfp4", "nfp4", LocationForm::BBox, cat, {}, dims, "(0.0195, 0.2344, 0.0586, 0.2832)"},
        {"bbox ivb224", "ivb224", LocationForm::BBox, cat, {}, dims, "(4, 52, 13, 63)"},
        {"bbox diga16", "diga16x14", LocationForm::BBox, cat, {}, dims, "(0, 4, 3, 11, 6, 0)"},
        {"point nfp4", "nfp4", LocationForm::Point, {}, centre, dims, "(0.0391, 0.2588)"},
        {"point ivb224", "ivb224", LocationForm::Point, {}, centre, dims, "(8, 57)"},
        {"point diga16", "diga16x14", LocationForm::Point, {}, centre, dims, "(0, 4, 2, -5)"},
        {"full image nfp4", "nfp4", LocationForm::BBox, {0, 0, 512, 512}, {}, dims,
         "(0.0000, 0.0000, 1.0000, 1.0000)"},
        {"midpoint nfp4", "nfp4", LocationForm::Point, {}, {256, 256}, dims, "(0.5000, 0.5000)"},
    };
  }();
  return v;
}

}  // namespace spatialift::fixtures
