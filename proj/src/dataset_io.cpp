// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/dataset_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "spatialift/errors.hpp"

namespace spatialift::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

namespace {

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
}

// Ids may arrive as numbers or strings.
std::string id_string(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaError(where + ": '" + key + "' must be a string or integer");
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": bad type for '" + key + "'");
  }
}

Json bbox_json(const BBox& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

BBox bbox_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw SchemaError(where + ": bbox must have 4 numbers");
  BBox b;
  try {
    b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": bbox must have 4 numbers");
  }
  return b;
}

std::string where_of(const Json& j) {
  if (j.is_object() && j.contains("sample_id") && j["sample_id"].is_string()) {
    return "record " + j["sample_id"].get<std::string>();
  }
  return "record";
}

template <typename E, typename F>
E enum_field(const Json& j, const char* key, F&& conv, const std::string& where) {
  const auto s = field<std::string>(j, key, where);
  try {
    return conv(s);
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Annotations

CocoDataset parse_coco(std::string_view text, const std::string& source) {
  const Json j = parse_json(text, source);
  for (const char* key : {"images", "annotations", "categories"}) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw SchemaError(source + ": missing array '" + std::string(key) + "'");
    }
  }
  CocoDataset ds;
  std::map<long long, std::string> categories;
  for (const auto& c : j["categories"]) {
    const auto id = field<long long>(c, "id", source + " category");
    const auto name = field<std::string>(c, "name", source + " category " + std::to_string(id));
    if (!categories.emplace(id, name).second) {
      throw SchemaError(source + ": duplicate category id " + std::to_string(id));
    }
  }
  for (const auto& [id, name] : categories) ds.vocabulary.push_back(name);

  std::unordered_map<std::string, std::size_t> by_id;
  for (const auto& im : j["images"]) {
    AnnotatedImage img;
    img.image_id = id_string(im, "id", source + " image");
    const std::string where = source + " image " + img.image_id;
    img.dims = {field<int>(im, "width", where), field<int>(im, "height", where)};
    if (im.contains("file_name") && im["file_name"].is_string()) img.file_name = im["file_name"];
    if (img.dims.width <= 0 || img.dims.height <= 0) throw SchemaError(where + ": non-positive size");
    if (!by_id.emplace(img.image_id, ds.images.size()).second) {
      throw SchemaError(source + ": duplicate image id " + img.image_id);
    }
    ds.images.push_back(std::move(img));
  }
  ds.report.input_count = j["annotations"].size();
  for (const auto& a : j["annotations"]) {
    const std::string inst = id_string(a, "id", source + " annotation");
    const std::string where = source + " annotation " + inst;
    const auto img = by_id.find(id_string(a, "image_id", where));
    if (img == by_id.end()) {
      ds.report.tally("unknown_image");
      continue;
    }
    const auto cat = categories.find(field<long long>(a, "category_id", where));
    if (cat == categories.end()) {
      ds.report.tally("unknown_category");
      continue;
    }
    const auto& bb = a.contains("bbox") ? a["bbox"] : Json();
    if (!bb.is_array() || bb.size() != 4 ||
        !std::all_of(bb.begin(), bb.end(), [](const Json& v) { return v.is_number(); }) ||
        bb[2].get<double>() < 0 || bb[3].get<double>() < 0) {
      ds.report.tally("malformed_bbox");
      continue;
    }
    auto& image = ds.images[img->second];
    image.objects.push_back(
        {inst, cat->second,
         bbox_from_xywh(bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                        bb[3].get<double>())});
  }
  sort_canonical(ds.images);
  std::size_t kept = 0;
  for (const auto& im : ds.images) kept += im.objects.size();
  ds.report.emitted_count = kept;
  return ds;
}

CocoDataset load_coco(const fs::path& path) { return parse_coco(read_file(path), path.string()); }

Json coco_to_json(const std::vector<AnnotatedImage>& images,
                  const std::vector<std::string>& vocabulary) {
  Json j;
  j["images"] = Json::array();
  j["annotations"] = Json::array();
  j["categories"] = Json::array();
  std::map<std::string, int> cat_id;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    cat_id[vocabulary[i]] = static_cast<int>(i + 1);
    j["categories"].push_back({{"id", i + 1}, {"name", vocabulary[i]}});
  }
  for (const auto& im : images) {
    j["images"].push_back({{"id", im.image_id},
                           {"width", im.dims.width},
                           {"height", im.dims.height},
                           {"file_name", im.file_name}});
    for (const auto& o : im.objects) {
      const auto c = cat_id.find(o.category);
      if (c == cat_id.end()) throw InvalidArgument("category not in vocabulary: " + o.category);
      j["annotations"].push_back({{"id", o.instance_id},
                                  {"image_id", im.image_id},
                                  {"category_id", c->second},
                                  {"bbox", Json::array({o.bbox.x1, o.bbox.y1, o.bbox.x2 - o.bbox.x1,
                                                        o.bbox.y2 - o.bbox.y1})}});
    }
  }
  return j;
}

std::vector<CaptionRecord> load_caption_records(const fs::path& path) {
  std::vector<CaptionRecord> out;
  std::size_t line = 0;
  for (const auto& j : load_jsonl(path)) {
    ++line;
    const std::string where = path.string() + ":" + std::to_string(line);
    out.push_back({id_string(j, "image_id", where), id_string(j, "instance_id", where),
                   field<std::string>(j, "caption", where)});
  }
  return out;
}

LabelGrid parse_label_grid(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  LabelGrid g;
  if (!(in >> g.rows >> g.cols) || g.rows < 0 || g.cols < 0) {
    throw SchemaError(source + ": expected 'rows cols' header");
  }
  const std::size_t n = static_cast<std::size_t>(g.rows) * g.cols;
  g.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> g.labels[i])) {
      throw SchemaError(source + ": expected " + std::to_string(n) + " labels, got " +
                        std::to_string(i));
    }
  }
  std::string extra;
  if (in >> extra) throw SchemaError(source + ": trailing data '" + extra + "'");
  return g;
}

LabelGrid load_label_grid(const fs::path& path) {
  return parse_label_grid(read_file(path), path.string());
}

std::string label_grid_to_text(const LabelGrid& grid) {
  std::string out = std::to_string(grid.rows) + " " + std::to_string(grid.cols) + "\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out += ' ';
      out += std::to_string(grid.at(r, c));
    }
    out += '\n';
  }
  return out;
}

std::map<std::int64_t, std::string> load_category_sidecar(const fs::path& path) {
  const Json j = parse_json(read_file(path), path.string());
  if (!j.is_object()) throw SchemaError(path.string() + ": expected an object");
  std::map<std::int64_t, std::string> out;
  for (const auto& [k, v] : j.items()) {
    std::int64_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoll(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw SchemaError(path.string() + ": instance id '" + k + "' is not an integer");
    }
    if (!v.is_string()) throw SchemaError(path.string() + ": category for " + k + " not a string");
    out[id] = v.get<std::string>();
  }
  return out;
}

std::vector<VideoDetections> load_video_detections(const fs::path& path) {
  std::vector<VideoDetections> out;
  std::size_t line = 0;
  for (const auto& j : load_jsonl(path)) {
    ++line;
    const std::string where = path.string() + ":" + std::to_string(line);
    VideoDetections v;
    v.video_id = id_string(j, "video_id", where);
    v.dims = {field<int>(j, "width", where), field<int>(j, "height", where)};
    const auto frames = field<Json>(j, "frames", where);
    if (!frames.is_object()) throw SchemaError(where + ": 'frames' must be an object");
    for (const auto& [k, dets] : frames.items()) {
      int idx = 0;
      try {
        idx = std::stoi(k);
      } catch (const std::exception&) {
        throw SchemaError(where + ": frame index '" + k + "' is not an integer");
      }
      auto& list = v.frames[idx];
      for (const auto& d : dets) {
        list.push_back({field<std::string>(d, "category", where), bbox_from(d.value("bbox", Json()), where)});
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

Json video_to_json(const VideoDetections& v) {
  Json frames = Json::object();
  for (const auto& [idx, dets] : v.frames) {
    Json list = Json::array();
    for (const auto& d : dets) list.push_back({{"category", d.category}, {"bbox", bbox_json(d.bbox)}});
    frames[std::to_string(idx)] = list;
  }
  return {{"video_id", v.video_id}, {"width", v.dims.width}, {"height", v.dims.height}, {"frames", frames}};
}

std::vector<MediaCategories> load_media_categories(const fs::path& path) {
  std::vector<MediaCategories> out;
  std::size_t line = 0;
  for (const auto& j : load_jsonl(path)) {
    ++line;
    const std::string where = path.string() + ":" + std::to_string(line);
    MediaCategories m;
    m.media_id = id_string(j, "media_id", where);
    m.medium = j.contains("medium") ? enum_field<Medium>(j, "medium", medium_from_string, where)
                                    : Medium::Image;
    m.categories = field<std::vector<std::string>>(j, "categories", where);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> load_word_list(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    const auto start = line.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    out.push_back(line.substr(start));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records

namespace {

Json base_record(const std::string& id, const std::string& image_id, Objective obj,
                 const std::string& prompt, const std::string& target,
                 const std::optional<LocationText>& loc, const std::optional<ReprScheme>& scheme,
                 const std::optional<LocationForm>& form, const std::string& descriptor,
                 std::uint64_t seed) {
  Json j;
  j["sample_id"] = id;
  j["image_id"] = image_id;
  j["objective"] = to_string(obj);
  j["prompt"] = prompt;
  j["target"] = target;
  j["location_text"] = loc ? Json(loc->text) : Json();
  j["scheme"] = scheme ? Json(scheme->id()) : Json();
  j["form"] = form ? Json(to_string(*form)) : Json();
  j["descriptor"] = descriptor;
  j["seed"] = seed;
  return j;
}

Json object_json(const SpatialObject& o) {
  return {{"name", o.name}, {"instance_id", o.instance_id}, {"bbox", bbox_json(o.bbox)}};
}

SpatialObject object_from(const Json& j, const std::string& where) {
  return {field<std::string>(j, "name", where), field<std::string>(j, "instance_id", where),
          bbox_from(j.value("bbox", Json()), where)};
}

ReprScheme scheme_from(const Json& j, const std::string& where) {
  try {
    return ReprScheme::from_id(field<std::string>(j, "scheme", where));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace

Json to_json(const ConversationSample& s) {
  return base_record(s.sample_id, s.image_id, s.objective, s.prompt, s.target, s.location,
                     s.scheme, s.form, s.descriptor, s.seed);
}

ConversationSample conversation_from_json(const Json& j) {
  const auto where = where_of(j);
  ConversationSample s;
  s.sample_id = field<std::string>(j, "sample_id", where);
  s.image_id = field<std::string>(j, "image_id", where);
  s.objective = enum_field<Objective>(j, "objective", objective_from_string, where);
  s.prompt = field<std::string>(j, "prompt", where);
  s.target = field<std::string>(j, "target", where);
  s.scheme = scheme_from(j, where);
  s.form = enum_field<LocationForm>(j, "form", location_form_from_string, where);
  if (j.contains("location_text") && !j["location_text"].is_null()) {
    s.location = LocationText{field<std::string>(j, "location_text", where), s.scheme, s.form};
  }
  s.descriptor = field<std::string>(j, "descriptor", where);
  s.seed = field<std::uint64_t>(j, "seed", where);
  return s;
}

Json to_json(const SpatialBenchItem& item) {
  const std::string answer = "The " + item.query.name + " is located to the " +
                             to_string(item.gt_keyword) + " of " + item.ref.name + ".";
  Json j = base_record(item.item_id, item.image_id, item.objective, item.prompt, answer,
                       std::nullopt, std::nullopt, std::nullopt, item.query.name, item.seed);
  j["axis"] = to_string(item.axis);
  j["gt_keyword"] = to_string(item.gt_keyword);
  if (item.icl_context) {
    Json ctx = Json::array();
    for (const auto& [q, a] : *item.icl_context) ctx.push_back(Json::array({q, a}));
    j["icl_context"] = ctx;
  } else {
    j["icl_context"] = nullptr;
  }
  j["obj_query"] = object_json(item.query);
  j["obj_ref"] = object_json(item.ref);
  j["dims"] = Json::array({item.dims.width, item.dims.height});
  return j;
}

SpatialBenchItem spatial_item_from_json(const Json& j) {
  const auto where = where_of(j);
  SpatialBenchItem it;
  it.item_id = field<std::string>(j, "sample_id", where);
  it.image_id = field<std::string>(j, "image_id", where);
  it.objective = enum_field<Objective>(j, "objective", objective_from_string, where);
  if (it.objective != Objective::SpatialDirect && it.objective != Objective::SpatialICL) {
    throw SchemaError(where + ": not a spatial record");
  }
  it.prompt = field<std::string>(j, "prompt", where);
  it.seed = field<std::uint64_t>(j, "seed", where);
  it.axis = enum_field<Axis>(j, "axis", axis_from_string, where);
  it.gt_keyword = enum_field<Side>(j, "gt_keyword", side_from_string, where);
  it.query = object_from(field<Json>(j, "obj_query", where), where);
  it.ref = object_from(field<Json>(j, "obj_ref", where), where);
  const auto dims = field<std::vector<int>>(j, "dims", where);
  if (dims.size() != 2) throw SchemaError(where + ": dims must be [width, height]");
  it.dims = {dims[0], dims[1]};
  if (j.contains("icl_context") && !j["icl_context"].is_null()) {
    const auto ctx = field<std::vector<std::pair<std::string, std::string>>>(j, "icl_context", where);
    if (ctx.size() != 2) throw SchemaError(where + ": icl_context must hold two pairs");
    it.icl_context = std::array<PromptEngine::QA, 2>{ctx[0], ctx[1]};
  }
  return it;
}

Json to_json(const HallucinationItem& item) {
  Json j = base_record(item.item_id, item.media_id, Objective::Hallucination, item.prompt,
                       item.gt == Polarity::Yes ? "Yes" : "No", std::nullopt, std::nullopt,
                       std::nullopt, item.obj, item.seed);
  j["medium"] = to_string(item.medium);
  j["gt"] = to_string(item.gt);
  return j;
}

HallucinationItem hallucination_item_from_json(const Json& j) {
  const auto where = where_of(j);
  HallucinationItem it;
  it.item_id = field<std::string>(j, "sample_id", where);
  it.media_id = field<std::string>(j, "image_id", where);
  it.prompt = field<std::string>(j, "prompt", where);
  it.obj = field<std::string>(j, "descriptor", where);
  it.seed = field<std::uint64_t>(j, "seed", where);
  it.medium = enum_field<Medium>(j, "medium", medium_from_string, where);
  it.gt = enum_field<Polarity>(j, "gt", polarity_from_string, where);
  return it;
}

Json to_json(const VideoObjectTrack& t) {
  Json frames = Json::object();
  for (const auto& [idx, b] : t.per_frame_boxes) frames[std::to_string(idx)] = bbox_json(b);
  return {{"video_id", t.video_id},
          {"category", t.category},
          {"per_frame_boxes", frames},
          {"averaged_box", bbox_json(t.averaged_box)},
          {"is_static", t.is_static}};
}

Json to_json(const ReferenceRecord& r) {
  return base_record(r.sample_id, r.image_id, r.objective, r.prompt, r.target, std::nullopt,
                     std::nullopt, std::nullopt, r.descriptor, 0);
}

ReferenceRecord reference_from_json(const Json& j) {
  const auto where = where_of(j);
  ReferenceRecord r;
  r.sample_id = field<std::string>(j, "sample_id", where);
  r.image_id = field<std::string>(j, "image_id", where);
  r.objective = enum_field<Objective>(j, "objective", objective_from_string, where);
  r.prompt = field<std::string>(j, "prompt", where);
  r.target = field<std::string>(j, "target", where);
  r.descriptor = field<std::string>(j, "descriptor", where);
  return r;
}

std::string to_jsonl(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<Json> parse_jsonl(std::string_view text, const std::string& source) {
  std::vector<Json> out;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    auto row = text.substr(pos, end - pos);
    pos = end + 1;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(parse_json(row, source + ":" + std::to_string(line)));
  }
  return out;
}

std::vector<Json> load_jsonl(const fs::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

ModelRequest request_from_record(const Json& record) {
  const auto where = where_of(record);
  return {field<std::string>(record, "sample_id", where),
          field<std::string>(record, "image_id", where),
          field<std::string>(record, "prompt", where)};
}

GroundTruth ground_truth_from_record(const Json& record) {
  const auto where = where_of(record);
  const auto obj = enum_field<Objective>(record, "objective", objective_from_string, where);
  switch (obj) {
    case Objective::LocPred:
    case Objective::NegPred: {
      const auto s = conversation_from_json(record);
      LocationTruth t;
      t.item_id = s.sample_id;
      t.scheme = s.scheme;
      t.form = s.form;
      if (s.location) t.where = *s.location;
      return t;
    }
    case Objective::RevLoc:
      return RegionTruth{field<std::string>(record, "sample_id", where),
                         field<std::string>(record, "target", where)};
    case Objective::SpatialDirect:
    case Objective::SpatialICL:
      return spatial_item_from_json(record);
    case Objective::Hallucination:
      return hallucination_item_from_json(record);
    case Objective::VQA: {
      const auto r = reference_from_json(record);
      return VqaTruth{r.sample_id, r.target};
    }
    case Objective::CaptionRequest: {
      const auto r = reference_from_json(record);
      return RegionTruth{r.sample_id, r.target};
    }
  }
  throw SchemaError(where + ": unsupported objective");
}

Task task_of_record(const Json& record) {
  const auto where = where_of(record);
  switch (enum_field<Objective>(record, "objective", objective_from_string, where)) {
    case Objective::SpatialDirect:
    case Objective::SpatialICL: return Task::Spatial;
    case Objective::Hallucination: return Task::Hallucination;
    case Objective::VQA: return Task::VQA;
    case Objective::CaptionRequest: return Task::RegionDescription;
    default: throw SchemaError(where + ": record has no evaluation task");
  }
}

// ---------------------------------------------------------------------------
// Responses

Json to_json(const ModelResponse& r) {
  Json j{{"item_id", r.request_id}, {"text", r.text}};
  if (r.status == ResponseStatus::Error) {
    j["status"] = "error";
    j["error"] = r.error_detail.value_or("");
  }
  return j;
}

ModelResponse response_from_json(const Json& j) {
  const std::string where = "response";
  const auto id = field<std::string>(j, "item_id", where);
  if (j.contains("status") && j["status"] == "error") {
    return ModelResponse::error(id, j.value("error", std::string()));
  }
  return ModelResponse::ok(id, field<std::string>(j, "text", where + " " + id));
}

std::vector<ModelResponse> load_responses(const fs::path& path) {
  std::vector<ModelResponse> out;
  for (const auto& j : load_jsonl(path)) out.push_back(response_from_json(j));
  return out;
}

ResponseMap response_map(const std::vector<ModelResponse>& responses) {
  ResponseMap m;
  for (const auto& r : responses) {
    if (r.status == ResponseStatus::Ok) m.emplace(r.request_id, r.text);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const BuildReport& r) {
  Json j;
  j["input_count"] = r.input_count;
  j["emitted_count"] = r.emitted_count;
  j["exclusions"] = Json::object();
  for (const auto& [k, v] : r.exclusions) j["exclusions"][k] = v;
  j["notes"] = Json::object();
  for (const auto& [k, v] : r.notes) j["notes"][k] = v;
  return j;
}

namespace {
Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(); }
}  // namespace

Json to_json(const MetricsReport& r) {
  Json j;
  j["task"] = r.task;
  j["n"] = r.n;
  j["missing"] = r.missing;
  j["accuracy"] = opt(r.accuracy);
  j["split_accuracy"] = Json::object();
  for (const auto& [k, v] : r.split_accuracy) j["split_accuracy"][k] = v;
  j["split_counts"] = Json::object();
  for (const auto& [k, v] : r.split_counts) j["split_counts"][k] = v;
  j["precision"] = opt(r.precision);
  j["recall"] = opt(r.recall);
  j["f1"] = opt(r.f1);
  j["yes_ratio"] = opt(r.yes_ratio);
  j["meteor_mean"] = opt(r.meteor_mean);
  j["meta"] = Json::object();
  for (const auto& [k, v] : r.meta) j["meta"][k] = v;
  return j;
}

Json to_json(const EvalRecord& r) {
  Json j;
  j["item_id"] = r.item_id;
  j["task"] = to_string(r.task);
  j["gt"] = r.gt;
  j["split"] = r.split;
  j["missing"] = r.missing;
  if (r.correct) j["correct"] = *r.correct;
  if (r.score) j["score"] = *r.score;
  j["prediction"] = {{"kind", to_string(r.prediction.kind)}, {"raw", r.prediction.raw}};
  if (r.prediction.side) j["prediction"]["side"] = to_string(*r.prediction.side);
  if (r.prediction.polarity) j["prediction"]["polarity"] = to_string(*r.prediction.polarity);
  if (r.prediction.location) j["prediction"]["location"] = r.prediction.location->text;
  return j;
}

}  // namespace spatialift::io
