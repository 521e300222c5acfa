// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/dataset_builder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/rng.hpp"

namespace spatialift {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool object_valid(const AnnotatedObject& o, const ImageDims& dims) {
  try {
    validate(o.bbox, dims);
  } catch (const InvalidArgument&) {
    return false;
  }
  return !o.category.empty();
}

std::map<std::string, std::size_t> category_counts(const AnnotatedImage& img) {
  std::map<std::string, std::size_t> counts;
  for (const auto& o : img.objects) ++counts[o.category];
  return counts;
}

// Draws k distinct elements from `pool` (k clipped to pool size) with a
// partial Fisher-Yates shuffle.
std::vector<std::string> sample_without_replacement(std::vector<std::string> pool, std::size_t k,
                                                    SplitMix64& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

void BuildReport::merge(const BuildReport& other) {
  input_count += other.input_count;
  emitted_count += other.emitted_count;
  for (const auto& [k, v] : other.exclusions) exclusions[k] += v;
  for (const auto& [k, v] : other.notes) notes[k] = v;
}

bool image_id_less(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

void sort_canonical(std::vector<AnnotatedImage>& images) {
  std::stable_sort(images.begin(), images.end(), [](const auto& x, const auto& y) {
    return image_id_less(x.image_id, y.image_id);
  });
}

std::vector<UniqueInstance> filter_unique_instances(const std::vector<AnnotatedImage>& images,
                                                    BuildReport* report) {
  std::vector<UniqueInstance> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    std::map<std::string, std::vector<std::size_t>> by_cat;
    for (std::size_t k = 0; k < img.objects.size(); ++k) {
      if (!object_valid(img.objects[k], img.dims)) {
        if (report) report->tally("malformed_annotation");
        continue;
      }
      by_cat[img.objects[k].category].push_back(k);
    }
    // Keep object order so output does not depend on category spelling.
    std::vector<UniqueInstance> local;
    for (const auto& [cat, idx] : by_cat) {
      if (idx.size() == 1) {
        local.push_back({i, idx.front(), cat});
      } else if (report) {
        report->tally("repeated_category");
      }
    }
    std::sort(local.begin(), local.end(),
              [](const auto& a, const auto& b) { return a.object_index < b.object_index; });
    out.insert(out.end(), local.begin(), local.end());
  }
  return out;
}

std::vector<std::string> discover_negative_categories(const AnnotatedImage& image,
                                                      const std::vector<std::string>& vocabulary) {
  if (vocabulary.empty()) throw InvalidArgument("vocabulary must be non-empty");
  std::set<std::string> present;
  for (const auto& o : image.objects) present.insert(o.category);
  std::vector<std::string> out;
  for (const auto& c : vocabulary) {
    if (!present.contains(c)) out.push_back(c);
  }
  return out;
}

std::size_t mix_quota(double weight, double max_weight, std::size_t pairs) {
  if (weight <= 0 || max_weight <= 0) return 0;
  return static_cast<std::size_t>(std::floor(static_cast<long double>(pairs) * weight / max_weight));
}

namespace {

// Pair i of `pairs` takes objective k iff floor((i+1) r) > floor(i r), r <= 1;
// this spreads exactly floor(pairs * r) selections evenly.
bool mix_selects(double weight, double max_weight, std::size_t i) {
  if (weight <= 0) return false;
  const long double r = static_cast<long double>(weight) / max_weight;
  return std::floor((i + 1) * r) > std::floor(i * r);
}

LocationText encode_object(const AnnotatedObject& o, const ImageDims& dims, const IftConfig& cfg) {
  return cfg.form == LocationForm::BBox ? encode_bbox(o.bbox, dims, cfg.scheme)
                                        : encode_point(center_of(o.bbox), dims, cfg.scheme);
}

const char* objective_tag(Objective o) {
  switch (o) {
    case Objective::LocPred: return "locpred";
    case Objective::NegPred: return "negpred";
    case Objective::RevLoc: return "revloc";
    default: return "other";
  }
}

}  // namespace

std::vector<ConversationSample> build_ift_dataset(const std::vector<AnnotatedImage>& images,
                                                  const IftConfig& cfg, const PromptEngine& engine,
                                                  BuildReport* report) {
  const auto& m = cfg.mix;
  if (m.locpred < 0 || m.negpred < 0 || m.revloc < 0) throw ConfigError("mix ratios must be non-negative");
  const double max_w = std::max({m.locpred, m.negpred, m.revloc});
  if (!(max_w > 0)) throw ConfigError("mix ratios must sum to a positive value");
  if (m.negpred > 0 && cfg.vocabulary.empty()) {
    throw ConfigError("NegPred samples need a non-empty category vocabulary");
  }

  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return image_id_less(images[a].image_id, images[b].image_id);
  });

  BuildReport local;
  local.input_count = images.size();
  std::vector<AnnotatedImage> sorted;
  sorted.reserve(images.size());
  for (auto i : order) sorted.push_back(images[i]);
  const auto pairs = filter_unique_instances(sorted, &local);

  std::vector<std::vector<ConversationSample>> per_pair(pairs.size());
  std::vector<BuildReport> per_pair_report(pairs.size());
  detail::parallel_for(pairs.size(), cfg.jobs, [&](std::size_t i) {
    const auto& up = pairs[i];
    const auto& img = sorted[up.image_index];
    const auto& obj = img.objects[up.object_index];
    auto caption = img.captions.find(obj.instance_id);
    const std::string descriptor = caption != img.captions.end() ? caption->second : obj.category;
    auto& out = per_pair[i];

    auto base = [&](Objective o) {
      ConversationSample s;
      s.sample_id = img.image_id + "_" + obj.instance_id + "_" + objective_tag(o);
      s.image_id = img.image_id;
      s.objective = o;
      s.scheme = cfg.scheme;
      s.form = cfg.form;
      s.seed = derive_seed(cfg.seed, s.sample_id);
      return s;
    };

    if (mix_selects(m.locpred, max_w, i)) {
      auto s = base(Objective::LocPred);
      s.location = encode_object(obj, img.dims, cfg);
      s.descriptor = descriptor;
      auto r = engine.render_locpred(s.descriptor, cfg.form, *s.location, s.seed);
      s.prompt = std::move(r.prompt);
      s.target = std::move(r.target);
      out.push_back(std::move(s));
    }
    if (mix_selects(m.negpred, max_w, i)) {
      auto s = base(Objective::NegPred);
      const auto negatives = discover_negative_categories(img, cfg.vocabulary);
      if (negatives.empty()) {
        per_pair_report[i].tally("no_negative_category");
      } else {
        SplitMix64 rng(s.seed);
        s.descriptor = negatives[rng.below(negatives.size())];
        auto r = engine.render_negpred(s.descriptor, cfg.form, s.seed);
        s.prompt = std::move(r.prompt);
        s.target = std::move(r.target);
        out.push_back(std::move(s));
      }
    }
    if (mix_selects(m.revloc, max_w, i)) {
      auto s = base(Objective::RevLoc);
      s.location = encode_object(obj, img.dims, cfg);
      s.descriptor = descriptor;
      auto r = engine.render_revloc(*s.location, s.descriptor, s.seed);
      s.prompt = std::move(r.prompt);
      s.target = std::move(r.target);
      out.push_back(std::move(s));
    }
  });

  std::set<std::size_t> contributing;
  for (const auto& p : pairs) contributing.insert(p.image_index);
  local.tally("no_eligible_object", sorted.size() - contributing.size());

  std::vector<ConversationSample> samples;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    local.merge(per_pair_report[i]);
    for (auto& s : per_pair[i]) samples.push_back(std::move(s));
  }
  local.emitted_count = samples.size();
  if (report) report->merge(local);
  return samples;
}

RenderedPair rerender(const ConversationSample& s, const PromptEngine& engine) {
  switch (s.objective) {
    case Objective::LocPred:
      if (!s.location) throw SchemaError("LocPred sample without location: " + s.sample_id);
      return engine.render_locpred(s.descriptor, s.form, *s.location, s.seed);
    case Objective::NegPred:
      return engine.render_negpred(s.descriptor, s.form, s.seed);
    case Objective::RevLoc:
      if (!s.location) throw SchemaError("RevLoc sample without location: " + s.sample_id);
      return engine.render_revloc(*s.location, s.descriptor, s.seed);
    default:
      throw SchemaError("not a conversation objective: " + s.sample_id);
  }
}

// ---------------------------------------------------------------------------

Side relative_side(const BBox& query, const BBox& ref, Axis axis) {
  if (axis == Axis::LR) return query.cx() < ref.cx() ? Side::Left : Side::Right;
  return query.cy() < ref.cy() ? Side::Above : Side::Below;
}

bool in_central_band(const BBox& b, const ImageDims& dims, Axis axis) {
  const double c = axis == Axis::LR ? b.cx() : b.cy();
  const double dim = axis == Axis::LR ? dims.width : dims.height;
  return c >= 0.4 * dim && c <= 0.6 * dim;
}

Side half_of(const BBox& b, const ImageDims& dims, Axis axis) {
  if (axis == Axis::LR) return b.cx() < 0.5 * dims.width ? Side::Left : Side::Right;
  return b.cy() < 0.5 * dims.height ? Side::Above : Side::Below;
}

std::vector<SpatialBenchItem> build_spatial_bench(const std::vector<AnnotatedImage>& images,
                                                  const SpatialBenchConfig& cfg,
                                                  const PromptEngine& engine,
                                                  BuildReport* report) {
  std::vector<AnnotatedImage> sorted = images;
  sort_canonical(sorted);

  std::vector<std::vector<SpatialBenchItem>> per_image(sorted.size());
  std::vector<BuildReport> reports(sorted.size());
  detail::parallel_for(sorted.size(), cfg.jobs, [&](std::size_t i) {
    const auto& img = sorted[i];
    auto& rep = reports[i];
    auto& out = per_image[i];

    const auto counts = category_counts(img);
    std::vector<const AnnotatedObject*> unique;
    for (const auto& o : img.objects) {
      if (counts.at(o.category) == 1 && object_valid(o, img.dims)) unique.push_back(&o);
    }

    for (Axis axis : cfg.axes) {
      const std::string ax = to_string(axis);
      if (unique.size() < 3) {
        rep.tally(ax + ".no_unique_triplet");
        continue;
      }
      std::vector<const AnnotatedObject*> outside;
      for (auto* o : unique) {
        if (!in_central_band(o->bbox, img.dims, axis)) outside.push_back(o);
      }
      if (outside.size() < 3) {
        rep.tally(ax + ".central_band");
        continue;
      }
      const Side first_half = half_of(outside.front()->bbox, img.dims, axis);
      const bool opposite_sides = std::any_of(outside.begin(), outside.end(), [&](auto* o) {
        return half_of(o->bbox, img.dims, axis) != first_half;
      });
      if (!opposite_sides) {
        rep.tally(ax + ".same_side");
        continue;
      }

      auto to_obj = [](const AnnotatedObject* o) {
        return SpatialObject{o->category, o->instance_id, o->bbox};
      };
      for (auto* ref : outside) {
        for (auto* query : outside) {
          if (ref == query) continue;
          if (half_of(ref->bbox, img.dims, axis) == half_of(query->bbox, img.dims, axis)) continue;
          SpatialBenchItem base;
          base.image_id = img.image_id;
          base.dims = img.dims;
          base.axis = axis;
          base.ref = to_obj(ref);
          base.query = to_obj(query);
          base.gt_keyword = relative_side(query->bbox, ref->bbox, axis);
          const std::string stem =
              img.image_id + "_" + ax + "_" + ref->instance_id + "_" + query->instance_id;

          auto direct = base;
          direct.objective = Objective::SpatialDirect;
          direct.item_id = stem + "_direct";
          direct.seed = derive_seed(cfg.seed, direct.item_id);
          direct.prompt = engine.render_spatial_query(ref->category, query->category, axis);
          out.push_back(std::move(direct));

          if (!cfg.icl) continue;
          auto icl = base;
          icl.objective = Objective::SpatialICL;
          icl.item_id = stem + "_icl";
          icl.seed = derive_seed(cfg.seed, icl.item_id);
          std::vector<const AnnotatedObject*> thirds;
          for (auto* o : outside) {
            if (o != ref && o != query) thirds.push_back(o);
          }
          SplitMix64 rng(icl.seed);
          const auto* third = thirds[rng.below(thirds.size())];
          // The third object is opposite exactly one member of the pair.
          const auto* partner =
              half_of(third->bbox, img.dims, axis) != half_of(ref->bbox, img.dims, axis) ? ref : query;
          const auto& w = partner->category;
          const auto& z = third->category;
          icl.icl_context = std::array<PromptEngine::QA, 2>{
              PromptEngine::QA{engine.render_spatial_query(w, z, axis),
                               engine.render_spatial_answer(
                                   w, relative_side(partner->bbox, third->bbox, axis), z)},
              PromptEngine::QA{engine.render_spatial_query(z, w, axis),
                               engine.render_spatial_answer(
                                   z, relative_side(third->bbox, partner->bbox, axis), w)},
          };
          icl.prompt = engine.render_spatial_query(ref->category, query->category, axis, icl.icl_context);
          out.push_back(std::move(icl));
        }
      }
    }
  });

  BuildReport local;
  local.input_count = sorted.size();
  local.notes["orderings"] = "both ordered pairs emitted per opposite-side pair";
  std::vector<SpatialBenchItem> items;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    local.merge(reports[i]);
    for (auto& it : per_image[i]) items.push_back(std::move(it));
  }
  local.emitted_count = items.size();
  if (report) report->merge(local);
  return items;
}

// ---------------------------------------------------------------------------

std::vector<MediaCategories> media_from_images(const std::vector<AnnotatedImage>& images) {
  std::vector<MediaCategories> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    MediaCategories m;
    m.media_id = img.image_id;
    m.medium = Medium::Image;
    for (const auto& o : img.objects) {
      if (std::find(m.categories.begin(), m.categories.end(), o.category) == m.categories.end()) {
        m.categories.push_back(o.category);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string with_article(std::string_view noun) {
  if (noun.empty()) return {};
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(noun.front())));
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return std::string(vowel ? "an " : "a ") + std::string(noun);
}

std::vector<HallucinationItem> build_hallucination_set(const std::vector<MediaCategories>& media,
                                                       const HallucinationConfig& cfg,
                                                       const PromptEngine& engine,
                                                       BuildReport* report) {
  if (cfg.vocabulary.empty()) throw ConfigError("hallucination vocabulary must be non-empty");
  if (cfg.novel) {
    std::set<std::string> ref;
    for (const auto& c : cfg.reference_classes) ref.insert(lower(c));
    for (const auto& c : cfg.vocabulary) {
      if (ref.contains(lower(c))) {
        throw ConfigError("novel vocabulary overlaps reference classes: '" + c + "'");
      }
    }
  }
  std::set<std::string> vocab(cfg.vocabulary.begin(), cfg.vocabulary.end());

  std::vector<const MediaCategories*> sorted;
  for (const auto& m : media) sorted.push_back(&m);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto* a, auto* b) { return image_id_less(a->media_id, b->media_id); });

  BuildReport local;
  local.input_count = sorted.size();
  std::vector<HallucinationItem> items;
  for (const auto* m : sorted) {
    std::vector<std::string> present;
    std::set<std::string> present_set;
    for (const auto& c : m->categories) {
      if (cfg.novel && !vocab.contains(c)) continue;
      if (present_set.insert(c).second) present.push_back(c);
    }
    std::vector<std::string> absent;
    for (const auto& c : cfg.vocabulary) {
      if (!present_set.contains(c) && std::find(absent.begin(), absent.end(), c) == absent.end()) {
        absent.push_back(c);
      }
    }
    if (present.empty()) local.tally("no_present_category");
    else if (present.size() < cfg.present_per_media) local.tally("few_present_categories");
    if (absent.size() < cfg.absent_per_media) local.tally("few_absent_categories");

    SplitMix64 rng(cfg.seed, m->media_id);
    const auto yes = sample_without_replacement(present, cfg.present_per_media, rng);
    const auto no = sample_without_replacement(absent, cfg.absent_per_media, rng);
    std::size_t k = 0;
    auto emit = [&](const std::string& cat, Polarity gt) {
      HallucinationItem it;
      it.item_id = m->media_id + "_h" + std::to_string(k++);
      it.media_id = m->media_id;
      it.medium = m->medium;
      it.obj = cat;
      it.gt = gt;
      it.seed = derive_seed(cfg.seed, it.item_id);
      it.prompt = engine.render_hallucination_query(with_article(cat), m->medium);
      items.push_back(std::move(it));
    };
    for (const auto& c : yes) emit(c, Polarity::Yes);
    for (const auto& c : no) emit(c, Polarity::No);
  }
  local.emitted_count = items.size();
  if (report) report->merge(local);
  return items;
}

// ---------------------------------------------------------------------------

bool has_unique_categories(const AnnotatedImage& image) {
  for (const auto& [cat, n] : category_counts(image)) {
    if (n > 1) return false;
  }
  return true;
}

std::vector<AnnotatedImage> ingest_pseudo_captions(const std::vector<AnnotatedImage>& images,
                                                   const std::vector<CaptionRecord>& records,
                                                   BuildReport* report) {
  BuildReport local;
  local.input_count = images.size();
  std::vector<AnnotatedImage> kept;
  for (const auto& img : images) {
    if (has_unique_categories(img)) {
      kept.push_back(img);
    } else {
      local.tally("repeated_category_image");
    }
  }
  sort_canonical(kept);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < kept.size(); ++i) index.emplace(kept[i].image_id, i);

  std::unordered_set<std::string> filtered;
  for (const auto& img : images) {
    if (!index.count(img.image_id)) filtered.insert(img.image_id);
  }

  std::size_t attached = 0;
  for (const auto& rec : records) {
    auto it = index.find(rec.image_id);
    if (it == index.end()) {
      local.tally(filtered.count(rec.image_id) ? "filtered_image" : "dangling_image");
      continue;
    }
    auto& img = kept[it->second];
    const bool known = std::any_of(img.objects.begin(), img.objects.end(),
                                   [&](const auto& o) { return o.instance_id == rec.instance_id; });
    if (!known) {
      local.tally("dangling_instance");
      continue;
    }
    if (rec.caption.empty()) {
      local.tally("empty_caption");
      continue;
    }
    if (!img.captions.emplace(rec.instance_id, rec.caption).second) {
      local.tally("duplicate_caption");
      continue;
    }
    ++attached;
  }
  local.notes["attached_captions"] = std::to_string(attached);
  local.emitted_count = kept.size();
  if (report) report->merge(local);
  return kept;
}

// ---------------------------------------------------------------------------

PanopticResult panoptic_to_bboxes(const LabelGrid& grid,
                                  const std::map<std::int64_t, std::string>& category_map,
                                  std::size_t min_pixels) {
  if (grid.rows < 0 || grid.cols < 0 ||
      grid.labels.size() != static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols)) {
    throw InvalidArgument("label grid size does not match its dimensions");
  }
  struct Extent {
    int c0, r0, c1, r1;
    std::size_t n;
  };
  std::map<std::int64_t, Extent> extents;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const auto id = grid.at(r, c);
      if (id == 0) continue;
      auto [it, fresh] = extents.try_emplace(id, Extent{c, r, c, r, 0});
      auto& e = it->second;
      e.c0 = std::min(e.c0, c);
      e.c1 = std::max(e.c1, c);
      e.r0 = std::min(e.r0, r);
      e.r1 = std::max(e.r1, r);
      ++e.n;
    }
  }
  PanopticResult out;
  for (const auto& [id, e] : extents) {
    auto cat = category_map.find(id);
    if (cat == category_map.end()) {
      throw SchemaError("instance id " + std::to_string(id) + " has no category");
    }
    out.present_categories.insert(cat->second);
    if (e.n < min_pixels) {
      ++out.dropped;
      continue;
    }
    out.boxes.push_back({id, cat->second,
                         BBox{static_cast<double>(e.c0), static_cast<double>(e.r0),
                              static_cast<double>(e.c1), static_cast<double>(e.r1)},
                         e.n});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<VideoObjectTrack> build_video_static_objects(const VideoDetections& video,
                                                         int num_frames, double static_radius,
                                                         BuildReport* report) {
  if (num_frames <= 0) throw InvalidArgument("num_frames must be positive");
  std::map<std::string, std::map<int, std::vector<BBox>>> by_cat;
  for (const auto& [frame, dets] : video.frames) {
    if (frame < 0 || frame >= num_frames) {
      throw InvalidArgument("frame index " + std::to_string(frame) + " outside [0, " +
                            std::to_string(num_frames) + ")");
    }
    for (const auto& d : dets) by_cat[d.category][frame].push_back(d.bbox);
  }

  BuildReport local;
  local.input_count = by_cat.size();
  std::vector<VideoObjectTrack> tracks;
  for (const auto& [cat, frames] : by_cat) {
    const bool repeated = std::any_of(frames.begin(), frames.end(),
                                      [](const auto& f) { return f.second.size() > 1; });
    if (repeated) {
      local.tally("multi_instance_category");
      continue;
    }
    VideoObjectTrack t;
    t.video_id = video.video_id;
    t.category = cat;
    long double sx1 = 0, sy1 = 0, sx2 = 0, sy2 = 0, scx = 0, scy = 0;
    for (const auto& [f, boxes] : frames) {
      const auto& b = boxes.front();
      t.per_frame_boxes[f] = b;
      sx1 += b.x1;
      sy1 += b.y1;
      sx2 += b.x2;
      sy2 += b.y2;
      scx += b.cx();
      scy += b.cy();
    }
    const long double n = static_cast<long double>(frames.size());
    t.averaged_box = {static_cast<double>(sx1 / n), static_cast<double>(sy1 / n),
                      static_cast<double>(sx2 / n), static_cast<double>(sy2 / n)};
    const double mcx = static_cast<double>(scx / n), mcy = static_cast<double>(scy / n);
    t.is_static = frames.size() == 1 ||
                  std::all_of(t.per_frame_boxes.begin(), t.per_frame_boxes.end(), [&](const auto& fb) {
                    return std::hypot(fb.second.cx() - mcx, fb.second.cy() - mcy) <= static_radius;
                  });
    if (!t.is_static) local.tally("moving_object");
    tracks.push_back(std::move(t));
  }
  local.emitted_count = tracks.size();
  if (report) report->merge(local);
  return tracks;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, KeywordStat>> corpus_keyword_stats(
    const std::vector<std::string>& conversations, const std::vector<std::string>& phrases) {
  if (phrases.empty()) throw InvalidArgument("phrase list must be non-empty");
  std::vector<std::string> needles;
  for (const auto& p : phrases) needles.push_back(lower(p));
  std::vector<std::pair<std::string, KeywordStat>> out;
  for (const auto& p : phrases) out.push_back({p, {}});
  for (const auto& conv : conversations) {
    const std::string text = lower(conv);
    for (std::size_t k = 0; k < needles.size(); ++k) {
      if (text.find(needles[k]) != std::string::npos) ++out[k].second.count;
    }
  }
  for (auto& [p, stat] : out) {
    stat.fraction = conversations.empty() ? 0.0
                                          : static_cast<double>(stat.count) / conversations.size();
  }
  return out;
}

}  // namespace spatialift
