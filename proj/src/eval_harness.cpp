// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/eval_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "spatialift/errors.hpp"
#include "spatialift/stemmer.hpp"

namespace spatialift {

std::string to_string(Task t) {
  switch (t) {
    case Task::Spatial: return "spatial";
    case Task::VQA: return "vqa";
    case Task::Hallucination: return "hallucination";
    case Task::RegionDescription: return "region_description";
  }
  return "?";
}

Task task_from_string(std::string_view s) {
  if (s == "spatial") return Task::Spatial;
  if (s == "vqa") return Task::VQA;
  if (s == "hallucination") return Task::Hallucination;
  if (s == "region_description" || s == "region") return Task::RegionDescription;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

std::string to_string(SpatialMode m) { return m == SpatialMode::Strict ? "strict" : "containment"; }

SpatialMode spatial_mode_from_string(std::string_view s) {
  if (s == "strict") return SpatialMode::Strict;
  if (s == "containment") return SpatialMode::Containment;
  throw InvalidArgument("unknown spatial mode '" + std::string(s) + "'");
}

bool spatial_correct(std::string_view response, Side gt, SpatialMode mode) {
  const auto toks = word_tokens(response);
  auto has = [&](Side s) { return std::find(toks.begin(), toks.end(), to_string(s)) != toks.end(); };
  return has(gt) && (mode == SpatialMode::Containment || !has(opposite(gt)));
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  for (const auto& w : word_tokens(text)) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

bool vqa_correct(std::string_view response, std::string_view gt) {
  const auto g = word_tokens(gt);
  if (g.empty()) return false;
  const auto r = word_tokens(response);
  return std::search(r.begin(), r.end(), g.begin(), g.end()) != r.end();
}

namespace {

ReprScheme unused_scheme() { return ReprScheme::nfp(); }

EvalRecord missing_record(std::string id, Task task, std::string gt, std::string split) {
  EvalRecord r;
  r.item_id = std::move(id);
  r.task = task;
  r.gt = std::move(gt);
  r.split = std::move(split);
  r.missing = true;
  if (task == Task::RegionDescription) r.score = 0.0;
  else r.correct = false;
  return r;
}

}  // namespace

std::vector<EvalRecord> spatial_records(const std::vector<SpatialBenchItem>& items,
                                        const ResponseMap& responses, SpatialMode mode) {
  std::vector<EvalRecord> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    const std::string gt = to_string(it.gt_keyword);
    auto resp = responses.find(it.item_id);
    if (resp == responses.end()) {
      out.push_back(missing_record(it.item_id, Task::Spatial, gt, gt));
      continue;
    }
    EvalRecord r;
    r.item_id = it.item_id;
    r.task = Task::Spatial;
    r.gt = gt;
    r.split = gt;
    r.prediction = parse_response(resp->second, it.objective, unused_scheme(), LocationForm::BBox);
    r.correct = spatial_correct(resp->second, it.gt_keyword, mode);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> vqa_records(const std::vector<VqaTruth>& gt, const ResponseMap& responses) {
  std::vector<EvalRecord> out;
  for (const auto& g : gt) {
    auto resp = responses.find(g.item_id);
    if (resp == responses.end()) {
      out.push_back(missing_record(g.item_id, Task::VQA, g.answer, ""));
      continue;
    }
    EvalRecord r;
    r.item_id = g.item_id;
    r.task = Task::VQA;
    r.gt = g.answer;
    r.prediction = parse_response(resp->second, Objective::VQA, unused_scheme(), LocationForm::BBox);
    r.correct = vqa_correct(resp->second, g.answer);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> hallucination_records(const std::vector<HallucinationItem>& items,
                                              const ResponseMap& responses) {
  std::vector<EvalRecord> out;
  for (const auto& it : items) {
    const std::string gt = to_string(it.gt);
    auto resp = responses.find(it.item_id);
    if (resp == responses.end()) {
      out.push_back(missing_record(it.item_id, Task::Hallucination, gt, gt));
      continue;
    }
    EvalRecord r;
    r.item_id = it.item_id;
    r.task = Task::Hallucination;
    r.gt = gt;
    r.split = gt;
    r.prediction =
        parse_response(resp->second, Objective::Hallucination, unused_scheme(), LocationForm::BBox);
    r.correct = r.prediction.polarity.has_value() && *r.prediction.polarity == it.gt;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> region_records(const std::vector<RegionTruth>& gt,
                                       const ResponseMap& responses) {
  std::vector<EvalRecord> out;
  for (const auto& g : gt) {
    auto resp = responses.find(g.item_id);
    if (resp == responses.end()) {
      out.push_back(missing_record(g.item_id, Task::RegionDescription, g.caption, ""));
      continue;
    }
    EvalRecord r;
    r.item_id = g.item_id;
    r.task = Task::RegionDescription;
    r.gt = g.caption;
    r.prediction.raw = resp->second;
    r.score = score_meteor(g.caption, resp->second);
    out.push_back(std::move(r));
  }
  return out;
}

MetricsReport score_spatial(const std::vector<SpatialBenchItem>& items, const ResponseMap& responses,
                            SpatialMode mode, const EvalContext& ctx) {
  EvalContext c = ctx;
  c.flags["spatial_mode"] = to_string(mode);
  return aggregate_report(spatial_records(items, responses, mode), c);
}

MetricsReport score_keyword_vqa(const std::vector<VqaTruth>& gt, const ResponseMap& responses,
                                const EvalContext& ctx) {
  return aggregate_report(vqa_records(gt, responses), ctx);
}

MetricsReport score_hallucination(const std::vector<HallucinationItem>& items,
                                  const ResponseMap& responses, const EvalContext& ctx) {
  return aggregate_report(hallucination_records(items, responses), ctx);
}

MetricsReport score_region_description(const std::vector<RegionTruth>& gt,
                                       const ResponseMap& responses, const EvalContext& ctx) {
  return aggregate_report(region_records(gt, responses), ctx);
}

MetricsReport aggregate_report(const std::vector<EvalRecord>& records, const EvalContext& ctx) {
  if (records.empty()) throw InvalidArgument("empty evaluation");
  const Task task = records.front().task;
  for (const auto& r : records) {
    if (r.task != task) throw InvalidArgument("mixed task families in one evaluation");
  }
  // Sorting makes floating sums independent of input order.
  std::vector<const EvalRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) {
              if (a->item_id != b->item_id) return a->item_id < b->item_id;
              return a->score.value_or(0.0) < b->score.value_or(0.0);
            });

  MetricsReport rep;
  rep.task = to_string(task);
  rep.n = sorted.size();
  for (auto* r : sorted) rep.missing += r->missing ? 1 : 0;

  rep.meta["config_digest"] = ctx.config_digest;
  rep.meta["dataset_digest"] = ctx.dataset_digest;
  for (const auto& [k, v] : ctx.flags) rep.meta[k] = v;

  if (task == Task::RegionDescription) {
    long double sum = 0;
    for (auto* r : sorted) sum += r->score.value_or(0.0);
    rep.meteor_mean = static_cast<double>(sum / sorted.size());
    rep.meta["meteor_variant"] = std::string(kMeteorVariant);
    return rep;
  }

  std::size_t correct = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> splits;  // correct, total
  for (auto* r : sorted) {
    const bool ok = r->correct.value_or(false);
    correct += ok;
    if (!r->split.empty()) {
      auto& s = splits[r->split];
      s.first += ok;
      ++s.second;
    }
  }
  rep.accuracy = static_cast<double>(correct) / rep.n;
  for (const auto& [k, v] : splits) {
    rep.split_accuracy[k] = static_cast<double>(v.first) / v.second;
    rep.split_counts[k] = v.second;
  }
  if (task == Task::VQA) rep.meta["vqa_normalization"] = std::string(kVqaNormalization);

  if (task == Task::Hallucination) {
    std::size_t tp = 0, fp = 0, fn = 0, yes = 0;
    for (auto* r : sorted) {
      const bool pred_yes = r->prediction.polarity == Polarity::Yes;
      const bool gt_yes = r->gt == "yes";
      yes += pred_yes;
      if (pred_yes && gt_yes) ++tp;
      else if (pred_yes && !gt_yes) ++fp;
      else if (!pred_yes && gt_yes) ++fn;
    }
    if (tp + fp > 0) rep.precision = static_cast<double>(tp) / (tp + fp);
    if (tp + fn > 0) rep.recall = static_cast<double>(tp) / (tp + fn);
    if (rep.precision && rep.recall) {
      const double p = *rep.precision, r = *rep.recall;
      rep.f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    rep.yes_ratio = static_cast<double>(yes) / rep.n;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// METEOR

std::vector<std::string> meteor_tokens(std::string_view text) { return word_tokens(text); }

namespace {

using Alignment = std::vector<std::pair<std::size_t, std::size_t>>;  // (hyp, ref)

std::size_t count_chunks(Alignment a) {
  if (a.empty()) return 0;
  std::sort(a.begin(), a.end());
  std::size_t chunks = 1;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i].first != a[i - 1].first + 1 || a[i].second != a[i - 1].second + 1) ++chunks;
  }
  return chunks;
}

// Injective maps from the smaller position list into the larger one.
void enumerate_maps(const std::vector<std::size_t>& hyp, const std::vector<std::size_t>& ref,
                    std::vector<Alignment>& out) {
  const bool hyp_small = hyp.size() <= ref.size();
  const auto& small = hyp_small ? hyp : ref;
  const auto& large = hyp_small ? ref : hyp;
  std::vector<bool> used(large.size(), false);
  Alignment cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == small.size()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.push_back(hyp_small ? std::pair{small[i], large[j]} : std::pair{large[j], small[i]});
      rec(i + 1);
      cur.pop_back();
      used[j] = false;
    }
  };
  rec(0);
}

double falling_factorial(std::size_t n, std::size_t k) {
  double r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

// One matching stage: maximum cardinality, then fewest chunks of the
// combined alignment. Falls back to order-preserving pairing per key when
// the search space is too large.
void align_stage(const std::vector<std::string>& hyp_keys, const std::vector<std::string>& ref_keys,
                 std::vector<bool>& hyp_used, std::vector<bool>& ref_used, Alignment& alignment) {
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < hyp_keys.size(); ++i) {
    if (!hyp_used[i]) groups[hyp_keys[i]].first.push_back(i);
  }
  for (std::size_t j = 0; j < ref_keys.size(); ++j) {
    if (!ref_used[j]) {
      auto it = groups.find(ref_keys[j]);
      if (it != groups.end()) it->second.second.push_back(j);
    }
  }

  constexpr double kMaxCombinations = 200000;
  double combos = 1;
  std::vector<std::vector<Alignment>> options;
  Alignment forced;
  for (const auto& [key, pos] : groups) {
    const auto& [h, r] = pos;
    if (h.empty() || r.empty()) continue;
    const std::size_t big = std::max(h.size(), r.size()), small = std::min(h.size(), r.size());
    if (small == 1 && big == 1) {
      forced.push_back({h[0], r[0]});
      continue;
    }
    const double count = falling_factorial(big, small);
    if (combos * count > kMaxCombinations) {
      for (std::size_t k = 0; k < small; ++k) forced.push_back({h[k], r[k]});
      continue;
    }
    combos *= count;
    options.emplace_back();
    enumerate_maps(h, r, options.back());
  }

  Alignment base = alignment;
  base.insert(base.end(), forced.begin(), forced.end());
  Alignment best;
  std::size_t best_chunks = SIZE_MAX;
  Alignment cur = base;
  std::function<void(std::size_t)> rec = [&](std::size_t g) {
    if (g == options.size()) {
      const auto ch = count_chunks(cur);
      if (ch < best_chunks) {
        best_chunks = ch;
        best = cur;
      }
      return;
    }
    for (const auto& opt : options[g]) {
      cur.insert(cur.end(), opt.begin(), opt.end());
      rec(g + 1);
      cur.resize(cur.size() - opt.size());
    }
  };
  rec(0);
  alignment = std::move(best);
  for (const auto& [i, j] : alignment) {
    hyp_used[i] = true;
    ref_used[j] = true;
  }
}

}  // namespace

MeteorDetail meteor_detail(std::string_view reference, std::string_view hypothesis) {
  const auto ref = meteor_tokens(reference);
  if (ref.empty()) throw InvalidArgument("METEOR reference must be non-empty");
  const auto hyp = meteor_tokens(hypothesis);
  MeteorDetail d;
  if (hyp.empty()) return d;

  std::vector<bool> hyp_used(hyp.size(), false), ref_used(ref.size(), false);
  Alignment alignment;
  align_stage(hyp, ref, hyp_used, ref_used, alignment);

  std::vector<std::string> hyp_stems, ref_stems;
  for (const auto& w : hyp) hyp_stems.push_back(porter_stem(w));
  for (const auto& w : ref) ref_stems.push_back(porter_stem(w));
  align_stage(hyp_stems, ref_stems, hyp_used, ref_used, alignment);

  d.matches = alignment.size();
  if (d.matches == 0) return d;
  d.chunks = count_chunks(alignment);
  const double m = static_cast<double>(d.matches);
  d.precision = m / hyp.size();
  d.recall = m / ref.size();
  d.fmean = 10.0 * d.precision * d.recall / (d.recall + 9.0 * d.precision);
  d.penalty = 0.5 * std::pow(static_cast<double>(d.chunks) / m, 3.0);
  d.score = d.fmean * (1.0 - d.penalty);
  return d;
}

double score_meteor(std::string_view reference, std::string_view hypothesis) {
  return meteor_detail(reference, hypothesis).score;
}

}  // namespace spatialift
