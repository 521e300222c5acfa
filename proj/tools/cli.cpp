// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "spatialift/coord_codec.hpp"
#include "spatialift/dataset_builder.hpp"
#include "spatialift/dataset_io.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/eval_harness.hpp"
#include "spatialift/fixtures.hpp"
#include "spatialift/model_gateway.hpp"
#include "spatialift/prompt_engine.hpp"

namespace spatialift::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

class AlignmentError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kFooter = R"(Exit codes: 0 ok, 1 I/O error, 2 argument or parse error, 3 schema error,
4 evaluation alignment error.

Environment: GATEWAY_ENDPOINT, GATEWAY_BATCH_DIR and GATEWAY_MAX_INFLIGHT
supply defaults for the matching query flags.

Options may also be read from a TOML file given with --config; keys use the
long option names, in [build.ift], [query], ... sections for subcommands.
Flags given on the command line override the file.)";

ImageDims parse_dims(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t u1 = 0, u2 = 0;
    const int w = std::stoi(s.substr(0, x), &u1);
    const int h = std::stoi(s.substr(x + 1), &u2);
    if (u1 != x || u2 != s.size() - x - 1) throw std::invalid_argument(s);
    const ImageDims d{w, h};
    validate(d);
    return d;
  } catch (const std::logic_error&) {
    throw ParseError("--dims must look like 512x512", s);
  }
}

std::vector<double> parse_numbers(const std::string& s, std::size_t n, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ParseError(flag + " expects " + std::to_string(n) + " comma-separated numbers", tok);
    }
  }
  if (out.size() != n) {
    throw ParseError(flag + " expects " + std::to_string(n) + " comma-separated numbers", s);
  }
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * v;
  return os.str();
}

struct SchemeArgs {
  std::string kind = "nfp";
  int decimals = 4;
  int bins = 224;
  int grid = 16;
  int patch = 14;

  void add(CLI::App* app) {
    app->add_option("--scheme", kind, "Coordinate scheme: nfp, ivb or diga")
        ->check(CLI::IsMember({"nfp", "ivb", "diga"}))
        ->capture_default_str();
    app->add_option("--decimals", decimals, "NFP decimal places")->capture_default_str();
    app->add_option("--nb", bins, "IVB bin count")->capture_default_str();
    app->add_option("--grid", grid, "DIGA anchors per side")->capture_default_str();
    app->add_option("--patch", patch, "DIGA patch size in pixels")->capture_default_str();
  }
  ReprScheme make() const {
    switch (scheme_kind_from_string(kind)) {
      case SchemeKind::NFP: return ReprScheme::nfp(decimals);
      case SchemeKind::IVB: return ReprScheme::ivb(bins);
      case SchemeKind::DIGA: return ReprScheme::diga(grid, patch);
    }
    throw InvalidArgument("unknown scheme " + kind);
  }
};

// Output file, its report, and the effective configuration digest.
struct Output {
  fs::path out;
  fs::path report;

  void add(CLI::App* app, const std::string& what) {
    app->add_option("--out,-o", out, what)->required();
    app->add_option("--report", report, "Report file (default: <out>.report.json)");
  }
  fs::path report_path() const {
    if (!report.empty()) return report;
    fs::path r = out;
    r += ".report.json";
    return r;
  }
};

std::string digest_of(const Json& config) { return io::sha256_hex(config.dump()); }

std::string relative_to_report(const fs::path& file, const fs::path& report) {
  const auto base = fs::absolute(report).parent_path();
  return fs::absolute(file).lexically_relative(base).generic_string();
}

// Writes `content` to the output and a report embedding the config digest,
// input digests and the output digest.
void write_with_report(const Output& o, const std::string& content, Json report, const Json& config,
                       const std::vector<fs::path>& inputs) {
  io::write_file(o.out, content);
  Json full;
  full["command"] = config.value("command", "");
  full["config"] = config;
  full["config_digest"] = digest_of(config);
  Json digests = Json::array();
  for (const auto& p : inputs) digests.push_back(io::file_sha256(p));
  full["dataset_digest"] = io::sha256_hex(digests.dump());
  full["output"] = relative_to_report(o.out, o.report_path());
  full["output_digest"] = io::sha256_hex(content);
  for (auto& [k, v] : report.items()) full[k] = v;
  io::write_file(o.report_path(), full.dump(2) + "\n");
}

std::vector<std::string> load_vocabulary(const fs::path& path, const std::vector<std::string>& fallback) {
  if (path.empty()) return fallback;
  return io::load_word_list(path);
}

std::string vocabulary_digest(const std::vector<std::string>& v) {
  return io::sha256_hex(Json(v).dump());
}

PromptEngine make_engine(const fs::path& templates) {
  if (templates.empty()) return PromptEngine();
  return PromptEngine(TemplateSet::load_override(templates));
}

Json template_config(const fs::path& templates) {
  return templates.empty() ? Json("builtin") : Json(io::file_sha256(templates));
}

Json with_loader_tallies(const BuildReport& build, const BuildReport& loader) {
  Json j = io::to_json(build);
  for (const auto& [k, v] : loader.exclusions) j["exclusions"]["load." + k] = v;
  return j;
}

// ---------------------------------------------------------------------------
// Commands

struct Globals {
  int jobs = 1;
};

void add_encode(CLI::App& app) {
  auto* cmd = app.add_subcommand("encode", "Encode a box or point as location text");
  auto bbox = std::make_shared<std::string>();
  auto point = std::make_shared<std::string>();
  auto dims = std::make_shared<std::string>();
  auto scheme = std::make_shared<SchemeArgs>();
  auto* b = cmd->add_option("--bbox", *bbox, "x1,y1,x2,y2 in pixels");
  auto* p = cmd->add_option("--point", *point, "cx,cy in pixels");
  b->excludes(p);
  cmd->add_option("--dims", *dims, "Image size WxH")->required();
  scheme->add(cmd);
  cmd->callback([=] {
    const auto d = parse_dims(*dims);
    const auto s = scheme->make();
    if (!bbox->empty()) {
      const auto v = parse_numbers(*bbox, 4, "--bbox");
      std::cout << encode_bbox({v[0], v[1], v[2], v[3]}, d, s).text << "\n";
    } else if (!point->empty()) {
      const auto v = parse_numbers(*point, 2, "--point");
      std::cout << encode_point({v[0], v[1]}, d, s).text << "\n";
    } else {
      throw ParseError("one of --bbox or --point is required", "");
    }
  });
}

void add_decode(CLI::App& app) {
  auto* cmd = app.add_subcommand("decode", "Decode location text to pixels");
  auto text = std::make_shared<std::string>();
  auto form = std::make_shared<std::string>("bbox");
  auto dims = std::make_shared<std::string>();
  auto scheme = std::make_shared<SchemeArgs>();
  cmd->add_option("--text", *text, "Location text, e.g. \"(0.5000, 0.5000)\"")->required();
  cmd->add_option("--form", *form, "point or bbox")
      ->check(CLI::IsMember({"point", "bbox"}))
      ->capture_default_str();
  cmd->add_option("--dims", *dims, "Image size WxH")->required();
  scheme->add(cmd);
  cmd->callback([=] {
    const auto d = parse_dims(*dims);
    const LocationText t{*text, scheme->make(), location_form_from_string(*form)};
    if (t.form == LocationForm::Point) {
      const auto p = decode_point(t, d);
      std::cout << format_number(p.cx) << " " << format_number(p.cy) << "\n";
    } else {
      const auto b = decode_bbox(t, d);
      std::cout << format_number(b.x1) << " " << format_number(b.y1) << " " << format_number(b.x2)
                << " " << format_number(b.y2) << "\n";
    }
  });
}

void add_build_ift(CLI::App* build, std::shared_ptr<Globals> g) {
  auto* cmd = build->add_subcommand("ift", "Instruction-tuning conversations from annotations");
  struct Args {
    fs::path annotations, captions, vocabulary, templates;
    Output out;
    SchemeArgs scheme;
    std::string form = "bbox";
    std::string mix = "1,1,1";
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--annotations", a->annotations, "COCO-style annotation file")->required();
  cmd->add_option("--captions", a->captions, "Pseudo-caption records (JSONL)");
  cmd->add_option("--vocabulary", a->vocabulary, "Negative-category list (default: annotation categories)");
  cmd->add_option("--templates", a->templates, "Template override file");
  a->out.add(cmd, "Output records (JSONL)");
  a->scheme.add(cmd);
  cmd->add_option("--form", a->form, "point or bbox")->check(CLI::IsMember({"point", "bbox"}))->capture_default_str();
  cmd->add_option("--mix", a->mix, "LocPred,NegPred,RevLoc weights")->capture_default_str();
  cmd->add_option("--seed", a->seed, "Global seed")->capture_default_str();
  cmd->callback([a, g] {
    auto ds = io::load_coco(a->annotations);
    BuildReport report;
    std::vector<fs::path> inputs{a->annotations};
    auto images = ds.images;
    if (!a->captions.empty()) {
      images = ingest_pseudo_captions(images, io::load_caption_records(a->captions), &report);
      inputs.push_back(a->captions);
    }
    const auto m = parse_numbers(a->mix, 3, "--mix");
    IftConfig cfg;
    cfg.scheme = a->scheme.make();
    cfg.form = location_form_from_string(a->form);
    cfg.mix = {m[0], m[1], m[2]};
    cfg.seed = a->seed;
    cfg.vocabulary = load_vocabulary(a->vocabulary, ds.vocabulary);
    cfg.jobs = g->jobs;
    const auto engine = make_engine(a->templates);
    const auto samples = build_ift_dataset(images, cfg, engine, &report);
    std::vector<Json> rows;
    for (const auto& s : samples) rows.push_back(io::to_json(s));
    const Json config{{"command", "build ift"},
                      {"scheme", cfg.scheme.id()},
                      {"form", a->form},
                      {"mix", m},
                      {"seed", a->seed},
                      {"captions", !a->captions.empty()},
                      {"vocabulary", vocabulary_digest(cfg.vocabulary)},
                      {"templates", template_config(a->templates)}};
    write_with_report(a->out, io::to_jsonl(rows), with_loader_tallies(report, ds.report), config, inputs);
    std::cout << "wrote " << rows.size() << " samples to " << a->out.out.string() << "\n";
  });
}

void add_build_spatial(CLI::App* build, std::shared_ptr<Globals> g) {
  auto* cmd = build->add_subcommand("spatial-bench", "Left/right and above/below benchmark");
  struct Args {
    fs::path annotations, templates;
    Output out;
    std::vector<std::string> axes{"LR", "AB"};
    bool no_icl = false;
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--annotations", a->annotations, "COCO-style annotation file")->required();
  cmd->add_option("--templates", a->templates, "Template override file");
  a->out.add(cmd, "Output records (JSONL)");
  cmd->add_option("--axes", a->axes, "Axes to build: LR, AB")->delimiter(',')->capture_default_str();
  cmd->add_flag("--no-icl", a->no_icl, "Skip in-context items");
  cmd->add_option("--seed", a->seed, "Global seed")->capture_default_str();
  cmd->callback([a, g] {
    auto ds = io::load_coco(a->annotations);
    SpatialBenchConfig cfg;
    cfg.seed = a->seed;
    cfg.icl = !a->no_icl;
    cfg.jobs = g->jobs;
    cfg.axes.clear();
    for (const auto& ax : a->axes) cfg.axes.push_back(axis_from_string(ax));
    BuildReport report;
    const auto items = build_spatial_bench(ds.images, cfg, make_engine(a->templates), &report);
    std::vector<Json> rows;
    for (const auto& it : items) rows.push_back(io::to_json(it));
    const Json config{{"command", "build spatial-bench"},
                      {"axes", a->axes},
                      {"icl", cfg.icl},
                      {"seed", a->seed},
                      {"templates", template_config(a->templates)}};
    write_with_report(a->out, io::to_jsonl(rows), with_loader_tallies(report, ds.report), config,
                      {a->annotations});
    std::cout << "wrote " << rows.size() << " items to " << a->out.out.string() << "\n";
  });
}

void add_build_hallucination(CLI::App* build) {
  auto* cmd = build->add_subcommand("hallucination", "Object-presence yes/no questions");
  struct Args {
    fs::path annotations, media, vocabulary, novel, reference, templates;
    Output out;
    std::size_t present = 2, absent = 2;
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  auto* ann = cmd->add_option("--annotations", a->annotations, "COCO-style annotation file");
  auto* med = cmd->add_option("--media", a->media, "Media category lists (JSONL)");
  ann->excludes(med);
  cmd->add_option("--vocabulary", a->vocabulary, "Category list (default: annotation categories or COCO-80)");
  cmd->add_option("--novel-vocabulary", a->novel, "Novel category list; must not overlap --reference-classes");
  cmd->add_option("--reference-classes", a->reference, "Reference classes for novel mode (default: COCO-80)");
  cmd->add_option("--templates", a->templates, "Template override file");
  a->out.add(cmd, "Output records (JSONL)");
  cmd->add_option("--present", a->present, "Present-object questions per media")->capture_default_str();
  cmd->add_option("--absent", a->absent, "Absent-object questions per media")->capture_default_str();
  cmd->add_option("--seed", a->seed, "Global seed")->capture_default_str();
  cmd->callback([a] {
    std::vector<MediaCategories> media;
    std::vector<std::string> vocab = fixtures::coco80();
    BuildReport loader;
    fs::path input;
    if (!a->annotations.empty()) {
      auto ds = io::load_coco(a->annotations);
      media = media_from_images(ds.images);
      vocab = ds.vocabulary;
      loader = ds.report;
      input = a->annotations;
    } else if (!a->media.empty()) {
      media = io::load_media_categories(a->media);
      input = a->media;
    } else {
      throw ParseError("one of --annotations or --media is required", "");
    }
    HallucinationConfig cfg;
    cfg.vocabulary = load_vocabulary(a->vocabulary, vocab);
    cfg.present_per_media = a->present;
    cfg.absent_per_media = a->absent;
    cfg.seed = a->seed;
    if (!a->novel.empty()) {
      cfg.novel = true;
      cfg.vocabulary = io::load_word_list(a->novel);
      cfg.reference_classes = load_vocabulary(a->reference, fixtures::coco80());
    }
    BuildReport report;
    const auto items = build_hallucination_set(media, cfg, make_engine(a->templates), &report);
    std::vector<Json> rows;
    for (const auto& it : items) rows.push_back(io::to_json(it));
    const Json config{{"command", "build hallucination"},
                      {"present", a->present},
                      {"absent", a->absent},
                      {"seed", a->seed},
                      {"novel", cfg.novel},
                      {"vocabulary", vocabulary_digest(cfg.vocabulary)},
                      {"reference_classes", vocabulary_digest(cfg.reference_classes)},
                      {"templates", template_config(a->templates)}};
    write_with_report(a->out, io::to_jsonl(rows), with_loader_tallies(report, loader), config, {input});
    std::cout << "wrote " << rows.size() << " items to " << a->out.out.string() << "\n";
  });
}

void add_build_captions(CLI::App* build) {
  auto* cmd = build->add_subcommand("pseudo-captions", "Attach pseudo-captions to annotations");
  struct Args {
    fs::path annotations, captions;
    Output out;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--annotations", a->annotations, "COCO-style annotation file")->required();
  cmd->add_option("--captions", a->captions, "Caption records (JSONL)")->required();
  a->out.add(cmd, "Output images with captions (JSONL)");
  cmd->callback([a] {
    auto ds = io::load_coco(a->annotations);
    BuildReport report;
    const auto images = ingest_pseudo_captions(ds.images, io::load_caption_records(a->captions), &report);
    std::vector<Json> rows;
    for (const auto& img : images) {
      Json objs = Json::array();
      for (const auto& o : img.objects) {
        Json jo{{"instance_id", o.instance_id},
                {"category", o.category},
                {"bbox", Json::array({o.bbox.x1, o.bbox.y1, o.bbox.x2, o.bbox.y2})}};
        const auto c = img.captions.find(o.instance_id);
        jo["caption"] = c == img.captions.end() ? Json() : Json(c->second);
        objs.push_back(jo);
      }
      rows.push_back({{"image_id", img.image_id},
                      {"width", img.dims.width},
                      {"height", img.dims.height},
                      {"objects", objs}});
    }
    const Json config{{"command", "build pseudo-captions"}};
    write_with_report(a->out, io::to_jsonl(rows), with_loader_tallies(report, ds.report), config,
                      {a->annotations, a->captions});
    std::cout << "kept " << rows.size() << " images, attached " << report.notes["attached_captions"]
              << " captions\n";
  });
}

void add_build_video(CLI::App* build) {
  auto* cmd = build->add_subcommand("video-static", "Static-object tracks from per-frame detections");
  struct Args {
    fs::path detections;
    Output out;
    int frames = 8;
    double radius = 5.0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--detections", a->detections, "Per-video detections (JSONL)")->required();
  a->out.add(cmd, "Output tracks (JSONL)");
  cmd->add_option("--frames", a->frames, "Sampled frames per video")->capture_default_str();
  cmd->add_option("--radius", a->radius, "Static radius in pixels")->capture_default_str();
  cmd->callback([a] {
    BuildReport report;
    std::vector<Json> rows;
    const auto videos = io::load_video_detections(a->detections);
    report.input_count = videos.size();
    for (const auto& v : videos) {
      BuildReport one;
      for (const auto& t : build_video_static_objects(v, a->frames, a->radius, &one)) {
        rows.push_back(io::to_json(t));
      }
      one.input_count = 0;
      report.merge(one);
    }
    report.emitted_count = rows.size();
    const Json config{{"command", "build video-static"}, {"frames", a->frames}, {"radius", a->radius}};
    write_with_report(a->out, io::to_jsonl(rows), io::to_json(report), config, {a->detections});
    std::cout << "wrote " << rows.size() << " tracks to " << a->out.out.string() << "\n";
  });
}

void add_build_panoptic(CLI::App* build) {
  auto* cmd = build->add_subcommand("panoptic", "Boxes and present categories from a label grid");
  struct Args {
    fs::path grid, sidecar;
    Output out;
    std::size_t min_pixels = 10;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--grid", a->grid, "Label grid text file")->required();
  cmd->add_option("--sidecar", a->sidecar, "Instance to category map (JSON)")->required();
  a->out.add(cmd, "Output boxes (JSON)");
  cmd->add_option("--min-pixels", a->min_pixels, "Drop smaller instances")->capture_default_str();
  cmd->callback([a] {
    const auto res = panoptic_to_bboxes(io::load_label_grid(a->grid), io::load_category_sidecar(a->sidecar),
                                        a->min_pixels);
    Json boxes = Json::array();
    for (const auto& b : res.boxes) {
      boxes.push_back({{"instance_id", b.instance_id},
                       {"category", b.category},
                       {"bbox", Json::array({b.bbox.x1, b.bbox.y1, b.bbox.x2, b.bbox.y2})},
                       {"pixels", b.pixels}});
    }
    const Json out{{"boxes", boxes},
                   {"present_categories", Json(std::vector<std::string>(res.present_categories.begin(),
                                                                        res.present_categories.end()))},
                   {"dropped", res.dropped}};
    BuildReport report;
    report.input_count = res.boxes.size() + res.dropped;
    report.emitted_count = res.boxes.size();
    if (res.dropped) report.tally("below_min_pixels", res.dropped);
    const Json config{{"command", "build panoptic"}, {"min_pixels", a->min_pixels}};
    write_with_report(a->out, out.dump(2) + "\n", io::to_json(report), config, {a->grid, a->sidecar});
    std::cout << "wrote " << res.boxes.size() << " boxes to " << a->out.out.string() << "\n";
  });
}

// ---------------------------------------------------------------------------

AnswerSpace answer_space(const Json& record) {
  AnswerSpace s;
  switch (objective_from_string(record.at("objective").get<std::string>())) {
    case Objective::SpatialDirect:
    case Objective::SpatialICL:
      s.kind = record.value("axis", "LR") == "AB" ? AnswerSpace::Kind::AboveBelow
                                                  : AnswerSpace::Kind::LeftRight;
      break;
    case Objective::LocPred:
    case Objective::NegPred:
      s.kind = AnswerSpace::Kind::Location;
      if (record.contains("scheme") && record["scheme"].is_string()) {
        s.scheme = ReprScheme::from_id(record["scheme"].get<std::string>());
      }
      if (record.contains("form") && record["form"].is_string()) {
        s.form = location_form_from_string(record["form"].get<std::string>());
      }
      break;
    default:
      s.kind = AnswerSpace::Kind::YesNo;
  }
  return s;
}

void add_query(CLI::App& app, std::shared_ptr<Globals>) {
  auto* cmd = app.add_subcommand("query", "Send dataset prompts to a model or a mock");
  struct Args {
    fs::path records, ground_truth, batch_dir;
    Output out;
    std::string mock, endpoint, batch_name = "batch";
    std::uint64_t seed = 0;
    int max_inflight = 4, retries = 3, backoff_ms = 200, timeout_s = 60;
    double temperature = 0.2;
    int max_new_tokens = 256;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--records", a->records, "Dataset records (JSONL)")->required();
  a->out.add(cmd, "Response file (JSONL)");
  cmd->add_option("--mock", a->mock, "Answer with a mock model: oracle or random")
      ->check(CLI::IsMember({"oracle", "random"}));
  cmd->add_option("--ground-truth", a->ground_truth, "Ground truth for --mock oracle (default: --records)");
  cmd->add_option("--seed", a->seed, "Seed for --mock random")->capture_default_str();
  cmd->add_option("--endpoint", a->endpoint, "HTTP endpoint URL")->envname("GATEWAY_ENDPOINT");
  cmd->add_option("--batch-dir", a->batch_dir, "File-batch exchange directory")->envname("GATEWAY_BATCH_DIR");
  cmd->add_option("--batch-name", a->batch_name, "File-batch name")->capture_default_str();
  cmd->add_option("--max-inflight", a->max_inflight, "Concurrent requests")
      ->envname("GATEWAY_MAX_INFLIGHT")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--retries", a->retries, "Attempts per request")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--backoff-ms", a->backoff_ms, "Initial retry backoff")->capture_default_str();
  cmd->add_option("--timeout-s", a->timeout_s, "HTTP timeout / batch wait in seconds")->capture_default_str();
  cmd->add_option("--temperature", a->temperature, "Sampling temperature sent to the model")->capture_default_str();
  cmd->add_option("--max-new-tokens", a->max_new_tokens, "Generation budget sent to the model")
      ->capture_default_str();
  cmd->callback([a] {
    const auto records = io::load_jsonl(a->records);
    std::vector<ModelRequest> requests;
    for (const auto& r : records) requests.push_back(io::request_from_record(r));
    if (requests.empty()) throw SchemaError(a->records.string() + ": no records");
    SamplingConfig sampling{a->temperature, a->max_new_tokens};
    sampling.validate();
    QueryOptions qopts;
    qopts.max_inflight = a->max_inflight;
    qopts.max_attempts = a->retries;
    qopts.initial_backoff = std::chrono::milliseconds(a->backoff_ms);

    std::vector<ModelResponse> responses;
    Json config{{"command", "query"}};
    std::vector<fs::path> inputs{a->records};
    if (a->mock == "oracle") {
      std::map<std::string, GroundTruth> truth;
      const auto gt_path = a->ground_truth.empty() ? a->records : a->ground_truth;
      if (!a->ground_truth.empty()) inputs.push_back(a->ground_truth);
      for (const auto& r : io::load_jsonl(gt_path)) {
        auto g = io::ground_truth_from_record(r);
        truth.emplace(ground_truth_id(g), std::move(g));
      }
      FunctionTransport t([&truth](const ModelRequest& req, const SamplingConfig&) {
        const auto it = truth.find(req.request_id);
        if (it == truth.end()) return SendResult{SendResult::Kind::Permanent, "no ground truth"};
        const auto resp = oracle_mock(req, it->second);
        if (resp.status == ResponseStatus::Ok) return SendResult{SendResult::Kind::Ok, resp.text};
        return SendResult{SendResult::Kind::Permanent, resp.error_detail.value_or("")};
      });
      responses = query_batch(requests, sampling, t, qopts);
      config["mock"] = "oracle";
    } else if (a->mock == "random") {
      std::map<std::string, AnswerSpace> spaces;
      for (const auto& r : records) spaces.emplace(r.at("sample_id").get<std::string>(), answer_space(r));
      const auto seed = a->seed;
      FunctionTransport t([&spaces, seed](const ModelRequest& req, const SamplingConfig&) {
        const auto resp = random_mock(req, spaces.at(req.request_id), seed);
        return SendResult{SendResult::Kind::Ok, resp.text};
      });
      responses = query_batch(requests, sampling, t, qopts);
      config["mock"] = "random";
      config["seed"] = a->seed;
    } else if (!a->endpoint.empty()) {
      HttpTransport t(a->endpoint, std::chrono::seconds(a->timeout_s));
      responses = query_batch(requests, sampling, t, qopts);
      config["transport"] = "http";
    } else if (!a->batch_dir.empty()) {
      FileBatchOptions f;
      f.directory = a->batch_dir;
      f.batch_name = a->batch_name;
      f.timeout = std::chrono::seconds(a->timeout_s);
      responses = query_batch_files(requests, sampling, f);
      config["transport"] = "file-batch";
    } else {
      throw ParseError("no model configured: give --mock, --endpoint or --batch-dir", "");
    }
    config["temperature"] = a->temperature;
    config["max_new_tokens"] = a->max_new_tokens;

    std::vector<Json> rows;
    std::size_t failed = 0;
    for (const auto& r : responses) {
      rows.push_back(io::to_json(r));
      failed += r.status == ResponseStatus::Error;
    }
    Json report{{"requests", responses.size()}, {"errors", failed}};
    write_with_report(a->out, io::to_jsonl(rows), report, config, inputs);
    std::cout << "wrote " << rows.size() << " responses (" << failed << " errors) to "
              << a->out.out.string() << "\n";
    if (failed == responses.size()) throw IoError("all requests failed");
  });
}

void add_evaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate", "Score responses against dataset records");
  struct Args {
    fs::path records, responses, report, dump;
    std::string spatial_mode = "strict";
    double max_missing = 0.5;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--records", a->records, "Dataset records (JSONL)")->required();
  cmd->add_option("--responses", a->responses, "Response file (JSONL)")->required();
  cmd->add_option("--report", a->report, "Metrics report (JSON)")->required();
  cmd->add_option("--dump", a->dump, "Per-item dump (default: <report>.items.jsonl)");
  cmd->add_option("--spatial-mode", a->spatial_mode, "strict or containment")
      ->check(CLI::IsMember({"strict", "containment"}))
      ->capture_default_str();
  cmd->add_option("--max-missing", a->max_missing, "Abort when a larger fraction lacks a response")
      ->capture_default_str();
  cmd->callback([a] {
    const auto records = io::load_jsonl(a->records);
    if (records.empty()) throw SchemaError(a->records.string() + ": no records");
    const Task task = io::task_of_record(records.front());
    for (const auto& r : records) {
      if (io::task_of_record(r) != task) {
        throw SchemaError("record " + r.value("sample_id", "?") + " belongs to another task family");
      }
    }
    const auto responses = io::load_responses(a->responses);
    if (responses.empty()) throw AlignmentError(a->responses.string() + ": empty response file");
    const auto map = io::response_map(responses);

    std::set<std::string> ids;
    std::size_t missing = 0;
    for (const auto& r : records) {
      ids.insert(r.at("sample_id").get<std::string>());
      missing += !map.count(r.at("sample_id").get<std::string>());
    }
    std::size_t unknown = 0;
    for (const auto& r : responses) unknown += !ids.count(r.request_id);
    if (unknown) std::cerr << "warning: " << unknown << " responses match no record\n";
    if (missing) std::cerr << "warning: " << missing << " of " << records.size() << " items lack a response\n";
    if (static_cast<double>(missing) > a->max_missing * static_cast<double>(records.size())) {
      throw AlignmentError("too many missing responses: " + std::to_string(missing) + " of " +
                           std::to_string(records.size()));
    }

    const Json config{{"command", "evaluate"}, {"task", to_string(task)}, {"spatial_mode", a->spatial_mode},
                      {"max_missing", a->max_missing}};
    EvalContext ctx;
    ctx.config_digest = digest_of(config);
    ctx.dataset_digest = io::file_sha256(a->records);
    ctx.flags["responses_digest"] = io::file_sha256(a->responses);

    std::vector<EvalRecord> evals;
    switch (task) {
      case Task::Spatial: {
        std::vector<SpatialBenchItem> items;
        for (const auto& r : records) items.push_back(io::spatial_item_from_json(r));
        const auto mode = spatial_mode_from_string(a->spatial_mode);
        ctx.flags["spatial_mode"] = a->spatial_mode;
        evals = spatial_records(items, map, mode);
        break;
      }
      case Task::Hallucination: {
        std::vector<HallucinationItem> items;
        for (const auto& r : records) items.push_back(io::hallucination_item_from_json(r));
        evals = hallucination_records(items, map);
        break;
      }
      case Task::VQA: {
        std::vector<VqaTruth> gt;
        for (const auto& r : records) gt.push_back({r.at("sample_id"), r.at("target")});
        evals = vqa_records(gt, map);
        break;
      }
      case Task::RegionDescription: {
        std::vector<RegionTruth> gt;
        for (const auto& r : records) gt.push_back({r.at("sample_id"), r.at("target")});
        evals = region_records(gt, map);
        break;
      }
    }
    const auto metrics = aggregate_report(evals, ctx);

    std::vector<Json> dump_rows;
    for (const auto& e : evals) dump_rows.push_back(io::to_json(e));
    const std::string dump = io::to_jsonl(dump_rows);
    fs::path dump_path = a->dump;
    if (dump_path.empty()) {
      dump_path = a->report;
      dump_path += ".items.jsonl";
    }
    io::write_file(dump_path, dump);

    Json report = io::to_json(metrics);
    report["config"] = config;
    report["config_digest"] = ctx.config_digest;
    report["dataset_digest"] = ctx.dataset_digest;
    report["output"] = relative_to_report(dump_path, a->report);
    report["output_digest"] = io::sha256_hex(dump);
    io::write_file(a->report, report.dump(2) + "\n");

    switch (task) {
      case Task::Spatial:
        for (const auto& [k, v] : metrics.split_accuracy) {
          std::string name = k;
          name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
          std::cout << name << " " << percent(v) << "\n";
        }
        std::cout << "All " << percent(*metrics.accuracy) << "\n";
        break;
      case Task::VQA:
        std::cout << "Accuracy " << percent(*metrics.accuracy) << "\n";
        break;
      case Task::Hallucination: {
        auto show = [](const std::optional<double>& v) { return v ? percent(*v) : std::string("n/a"); };
        std::cout << "Accuracy " << show(metrics.accuracy) << " Precision " << show(metrics.precision)
                  << " Recall " << show(metrics.recall) << " F1 " << show(metrics.f1) << " Yes "
                  << show(metrics.yes_ratio) << "\n";
        break;
      }
      case Task::RegionDescription: {
        std::ostringstream os;
        os << std::fixed << std::setprecision(4) << *metrics.meteor_mean;
        std::cout << "METEOR " << os.str() << "\n";
        break;
      }
    }
  });
}

// One conversation per line: a JSON string, an object with "text", an object
// with a "conversations" list of {value}, or plain text.
std::vector<std::string> load_corpus(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(io::read_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '{' && line[0] != '"') {
      out.push_back(line);
      continue;
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    if (j.is_string()) {
      out.push_back(j.get<std::string>());
    } else if (j.contains("text") && j["text"].is_string()) {
      out.push_back(j["text"].get<std::string>());
    } else if (j.contains("conversations") && j["conversations"].is_array()) {
      std::string text;
      for (const auto& turn : j["conversations"]) {
        if (!text.empty()) text += "\n";
        text += turn.value("value", "");
      }
      out.push_back(std::move(text));
    } else {
      throw SchemaError(path.string() + ":" + std::to_string(n) + ": no conversation text");
    }
  }
  return out;
}

void add_keyword_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("keyword-stats", "Conversation-level phrase counts in a corpus");
  struct Args {
    fs::path corpus, report;
    std::vector<std::string> phrases;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--corpus", a->corpus, "Conversations, one per line")->required();
  cmd->add_option("--phrase", a->phrases, "Phrase to count (repeatable; default: left/right set)");
  cmd->add_option("--report", a->report, "Write counts as JSON");
  cmd->callback([a] {
    std::vector<std::string> phrases = a->phrases;
    if (phrases.empty()) {
      for (const auto& [p, n] : fixtures::keyword_corpus_counts()) phrases.push_back(p);
    }
    const auto corpus = load_corpus(a->corpus);
    const auto stats = corpus_keyword_stats(corpus, phrases);
    Json rows = Json::array();
    for (const auto& [p, s] : stats) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(2) << 100.0 * s.fraction;
      std::cout << "\"" << p << "\"\t" << s.count << "\t" << os.str() << "%\n";
      rows.push_back({{"phrase", p}, {"count", s.count}, {"fraction", s.fraction}});
    }
    if (!a->report.empty()) {
      const Json config{{"command", "keyword-stats"}, {"phrases", phrases}};
      Json rep{{"conversations", corpus.size()}, {"stats", rows}, {"config", config},
               {"config_digest", digest_of(config)}, {"dataset_digest", io::file_sha256(a->corpus)}};
      io::write_file(a->report, rep.dump(2) + "\n");
    }
  });
}

void add_fixtures(CLI::App& app) {
  auto* cmd = app.add_subcommand("fixtures", "Write the synthetic fixture set");
  auto dir = std::make_shared<fs::path>();
  auto corpus = std::make_shared<bool>(false);
  cmd->add_option("--out,-o", *dir, "Output directory")->required();
  cmd->add_flag("--keyword-corpus", *corpus, "Also write the 80,000-line keyword corpus");
  cmd->callback([dir, corpus] {
    const fs::path d = *dir;
    auto coco = [&](std::size_t n, std::uint64_t seed, const std::string& name) {
      fixtures::SyntheticCocoOptions o;
      o.images = n;
      o.seed = seed;
      const auto c = fixtures::synthetic_coco(o);
      io::write_file(d / name, io::coco_to_json(c.images, c.vocabulary).dump(1) + "\n");
    };
    coco(50, 1, "coco_50.json");
    coco(100, 5, "coco_100.json");
    coco(200, 2, "coco_200.json");

    const auto cap = fixtures::caption_fixture();
    io::write_file(d / "captions_images.json", io::coco_to_json(cap.images, cap.vocabulary).dump(1) + "\n");
    std::vector<Json> rows;
    for (const auto& r : cap.records) {
      rows.push_back({{"image_id", r.image_id}, {"instance_id", r.instance_id}, {"caption", r.caption}});
    }
    io::write_file(d / "captions.jsonl", io::to_jsonl(rows));

    rows.clear();
    for (const auto& m : fixtures::balanced_media(2500, 4)) {
      rows.push_back({{"media_id", m.media_id}, {"medium", to_string(m.medium)}, {"categories", m.categories}});
    }
    io::write_file(d / "media_balanced.jsonl", io::to_jsonl(rows));

    rows.clear();
    for (const auto& r : fixtures::vqa_fixture(200, 6)) rows.push_back(io::to_json(r));
    io::write_file(d / "vqa.jsonl", io::to_jsonl(rows));
    rows.clear();
    for (const auto& r : fixtures::region_fixture(100, 7)) rows.push_back(io::to_json(r));
    io::write_file(d / "region.jsonl", io::to_jsonl(rows));

    rows.clear();
    for (const auto& v : fixtures::video_fixture(20, 8)) rows.push_back(io::video_to_json(v));
    io::write_file(d / "videos.jsonl", io::to_jsonl(rows));

    const auto masks = fixtures::fuzzed_masks(5, 9);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      io::write_file(d / ("panoptic_" + std::to_string(i) + ".txt"), io::label_grid_to_text(masks[i].grid));
      Json side = Json::object();
      for (const auto& [id, name] : masks[i].categories) side[std::to_string(id)] = name;
      io::write_file(d / ("panoptic_" + std::to_string(i) + ".json"), side.dump(1) + "\n");
    }

    Json golden = Json::array();
    for (const auto& g : fixtures::golden_vectors()) {
      Json row{{"name", g.name}, {"scheme", g.scheme_id}, {"form", to_string(g.form)},
               {"dims", Json::array({g.dims.width, g.dims.height})}};
      row["input"] = g.form == LocationForm::BBox ? Json::array({g.box.x1, g.box.y1, g.box.x2, g.box.y2})
                                                  : Json::array({g.point.cx, g.point.cy});
      row["expected"] = g.expected;
      golden.push_back(row);
    }
    io::write_file(d / "golden_vectors.json", golden.dump(1) + "\n");

    if (*corpus) {
      rows.clear();
      for (const auto& text : fixtures::keyword_corpus()) rows.push_back(Json(text));
      io::write_file(d / "keyword_corpus.jsonl", io::to_jsonl(rows));
    }
    std::cout << "wrote fixtures to " << d.string() << "\n";
  });
}

void add_verify(CLI::App& app) {
  auto* cmd = app.add_subcommand("verify", "Recompute the digests recorded in report files");
  auto reports = std::make_shared<std::vector<fs::path>>();
  cmd->add_option("reports", *reports, "Report files")->required();
  cmd->callback([reports] {
    std::size_t bad = 0;
    for (const auto& path : *reports) {
      const Json rep = Json::parse(io::read_file(path));
      std::vector<std::string> problems;
      if (rep.contains("config") && rep.contains("config_digest") &&
          digest_of(rep["config"]) != rep["config_digest"].get<std::string>()) {
        problems.push_back("config digest");
      }
      if (rep.contains("output") && rep.contains("output_digest")) {
        const auto out = fs::absolute(path).parent_path() / rep["output"].get<std::string>();
        if (!fs::exists(out)) {
          problems.push_back("missing output " + out.string());
        } else if (io::file_sha256(out) != rep["output_digest"].get<std::string>()) {
          problems.push_back("output digest");
        }
      }
      if (problems.empty()) {
        std::cout << "OK " << path.string() << "\n";
      } else {
        ++bad;
        std::cout << "MISMATCH " << path.string();
        for (const auto& p : problems) std::cout << " [" << p << "]";
        std::cout << "\n";
      }
    }
    if (bad) throw SchemaError(std::to_string(bad) + " report(s) failed verification");
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"spatialift: location-aware instruction data, spatial benchmarks and evaluation"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file");
  auto g = std::make_shared<Globals>();
  app.add_option("--jobs,-j", g->jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  add_encode(app);
  add_decode(app);
  auto* build = app.add_subcommand("build", "Build a dataset");
  build->require_subcommand(1);
  add_build_ift(build, g);
  add_build_spatial(build, g);
  add_build_hallucination(build);
  add_build_captions(build);
  add_build_video(build);
  add_build_panoptic(build);
  add_query(app, g);
  add_evaluate(app);
  add_keyword_stats(app);
  add_fixtures(app);
  add_verify(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kUsageError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const AlignmentError& e) {
    std::cerr << "alignment error: " << e.what() << "\n";
    return kAlignmentError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("spatialift");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace spatialift::cli
