// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/prompt_engine.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "spatialift/errors.hpp"

namespace spatialift {

namespace {

void require_nonempty(std::string_view v, const char* what) {
  if (v.empty()) throw InvalidArgument(std::string(what) + " must be non-empty");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<const char*, E>, N>& table,
         const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw InvalidArgument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<const char*, Objective>, 8> kObjectives{{
    {"LocPred", Objective::LocPred},
    {"NegPred", Objective::NegPred},
    {"RevLoc", Objective::RevLoc},
    {"SpatialDirect", Objective::SpatialDirect},
    {"SpatialICL", Objective::SpatialICL},
    {"Hallucination", Objective::Hallucination},
    {"CaptionRequest", Objective::CaptionRequest},
    {"VQA", Objective::VQA},
}};

constexpr std::array<std::pair<const char*, Side>, 4> kSides{{
    {"left", Side::Left}, {"right", Side::Right}, {"above", Side::Above}, {"below", Side::Below}}};

constexpr std::array<std::pair<const char*, ResponseKind>, 5> kKinds{{
    {"location", ResponseKind::Location},
    {"negative", ResponseKind::Negative},
    {"side_answer", ResponseKind::SideAnswer},
    {"yes_no", ResponseKind::YesNo},
    {"free_text", ResponseKind::FreeText},
}};

const std::array<std::string_view, 4> kNegationPhrases{"no such object", "there is no",
                                                       "not present", "does not appear"};

}  // namespace

std::string to_string(Objective o) {
  for (const auto& [name, value] : kObjectives) {
    if (value == o) return name;
  }
  return "?";
}
Objective objective_from_string(std::string_view s) { return lookup(s, kObjectives, "objective"); }

std::string to_string(Axis a) { return a == Axis::LR ? "LR" : "AB"; }
Axis axis_from_string(std::string_view s) {
  if (s == "LR") return Axis::LR;
  if (s == "AB") return Axis::AB;
  throw InvalidArgument("unknown axis '" + std::string(s) + "'");
}

std::string to_string(Side s) {
  for (const auto& [name, value] : kSides) {
    if (value == s) return name;
  }
  return "?";
}
Side side_from_string(std::string_view s) { return lookup(s, kSides, "side"); }

Side opposite(Side s) {
  switch (s) {
    case Side::Left: return Side::Right;
    case Side::Right: return Side::Left;
    case Side::Above: return Side::Below;
    case Side::Below: return Side::Above;
  }
  return s;
}

std::string to_string(Medium m) { return m == Medium::Image ? "image" : "video"; }
Medium medium_from_string(std::string_view s) {
  if (s == "image") return Medium::Image;
  if (s == "video") return Medium::Video;
  throw InvalidArgument("unknown medium '" + std::string(s) + "'");
}

std::string to_string(Polarity p) { return p == Polarity::Yes ? "yes" : "no"; }
Polarity polarity_from_string(std::string_view s) {
  if (s == "yes") return Polarity::Yes;
  if (s == "no") return Polarity::No;
  throw InvalidArgument("unknown polarity '" + std::string(s) + "'");
}

std::string to_string(ResponseKind k) {
  for (const auto& [name, value] : kKinds) {
    if (value == k) return name;
  }
  return "?";
}
ResponseKind response_kind_from_string(std::string_view s) {
  return lookup(s, kKinds, "response kind");
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = [] {
    TemplateSet t;
    t.locpred_prompts = {
        "Where is the object described {category} located in image in terms of {repr}?",
        "What is the location of object described {category} in terms of {repr}?",
        "Localize the object described {category} in terms of {repr}?",
        "Provide a {repr} for the the object described {category}?",
        "Generate a {repr} for the the object described {category}?",
    };
    t.revloc_prompts = {
        "Describe the object located at {loc}?",
        "Provide a caption for object at {loc}?",
        "What is at location {loc} in image?",
    };
    t.locpred_target = "It is located at {loc}";
    t.negpred_target = "There is no such object in the image";
    t.revloc_target = "There is a {category}.";
    t.spatial_direct = "Which side of {obj1} is {obj2} located?";
    t.spatial_icl_answer = "The {obj1} is located to the {side} of {obj2}.";
    t.hallucination = "Is there {obj} in this {medium}?";
    t.caption_request =
        "Describe the {category} in this image using one short sentence, referring to its "
        "visual features and spatial position relative to other objects in image.";
    return t;
  }();
  return set;
}

TemplateSet TemplateSet::load_override(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template override file " + path.string());
  std::map<std::string, std::vector<std::string>> sections;
  std::string current, line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      current = line.substr(1, line.size() - 2);
      sections[current];
      continue;
    }
    if (current.empty()) throw ConfigError("template line before any section: " + line);
    sections[current].push_back(line);
  }

  TemplateSet t = builtin();
  auto single = [&](const std::string& name, std::string& slot) {
    auto it = sections.find(name);
    if (it == sections.end()) return;
    if (it->second.size() != 1) throw ConfigError("section [" + name + "] needs exactly one line");
    slot = it->second.front();
    sections.erase(it);
  };
  auto list = [&](const std::string& name, std::vector<std::string>& slot) {
    auto it = sections.find(name);
    if (it == sections.end()) return;
    if (it->second.empty()) throw ConfigError("section [" + name + "] is empty");
    slot = it->second;
    sections.erase(it);
  };
  list("locpred", t.locpred_prompts);
  list("revloc", t.revloc_prompts);
  single("locpred_target", t.locpred_target);
  single("negpred_target", t.negpred_target);
  single("revloc_target", t.revloc_target);
  single("spatial_direct", t.spatial_direct);
  single("spatial_icl_answer", t.spatial_icl_answer);
  single("hallucination", t.hallucination);
  single("caption_request", t.caption_request);
  if (!sections.empty()) {
    // NegPred prompts are the LocPred prompts; a separate section would break that.
    throw ConfigError("unknown template section [" + sections.begin()->first + "]");
  }
  t.override_path = path;
  return t;
}

std::string repr_placeholder(LocationForm form) {
  return form == LocationForm::BBox ? "(x1,y1,x2,y2) bbox" : "(cx,cy) point";
}

std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const auto key = tmpl.substr(i + 1, close - i - 1);
        auto it = std::find_if(values.begin(), values.end(),
                               [&](const auto& kv) { return kv.first == key; });
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

PromptEngine::PromptEngine(TemplateSet templates) : t_(std::move(templates)) {
  if (t_.locpred_prompts.empty() || t_.revloc_prompts.empty()) {
    throw ConfigError("template set needs at least one LocPred and one RevLoc prompt");
  }
}

RenderedPair PromptEngine::render_locpred(std::string_view descriptor, LocationForm form,
                                          const LocationText& loc, std::uint64_t seed) const {
  require_nonempty(descriptor, "descriptor");
  if (loc.form != form) throw InvalidArgument("location form does not match requested form");
  RenderedPair r = render_negpred(descriptor, form, seed);
  r.objective = Objective::LocPred;
  r.target = fill_template(t_.locpred_target, {{"loc", loc.text}});
  return r;
}

RenderedPair PromptEngine::render_negpred(std::string_view descriptor, LocationForm form,
                                          std::uint64_t seed) const {
  require_nonempty(descriptor, "descriptor");
  const auto& prompts = t_.locpred_prompts;
  RenderedPair r;
  r.objective = Objective::NegPred;
  r.seed = seed;
  r.template_index = static_cast<std::size_t>(seed % prompts.size());
  const std::string repr = repr_placeholder(form);
  r.prompt = fill_template(prompts[r.template_index], {{"category", descriptor}, {"repr", repr}});
  r.target = t_.negpred_target;
  return r;
}

RenderedPair PromptEngine::render_revloc(const LocationText& loc, std::string_view descriptor,
                                         std::uint64_t seed) const {
  require_nonempty(descriptor, "descriptor");
  require_nonempty(loc.text, "location");
  const auto& prompts = t_.revloc_prompts;
  RenderedPair r;
  r.objective = Objective::RevLoc;
  r.seed = seed;
  r.template_index = static_cast<std::size_t>(seed % prompts.size());
  r.prompt = fill_template(prompts[r.template_index], {{"loc", loc.text}});
  r.target = fill_template(t_.revloc_target, {{"category", descriptor}});
  return r;
}

std::string PromptEngine::render_spatial_query(std::string_view obj1, std::string_view obj2,
                                               Axis /*axis*/,
                                               const std::optional<std::array<QA, 2>>& icl) const {
  require_nonempty(obj1, "obj1");
  require_nonempty(obj2, "obj2");
  if (obj1 == obj2) throw InvalidArgument("spatial query needs two distinct objects");
  // Above/below questions keep the same "Which side" frame.
  const std::string question = fill_template(t_.spatial_direct, {{"obj1", obj1}, {"obj2", obj2}});
  if (!icl) return question;
  std::string out;
  for (const auto& [q, a] : *icl) {
    if (q.empty() || a.empty()) throw InvalidArgument("in-context examples must be non-empty");
    out += "Q: " + q + " A: " + a + " ";
  }
  return out + "Q: " + question;
}

std::string PromptEngine::render_spatial_answer(std::string_view first, Side side,
                                                std::string_view second) const {
  const std::string s = to_string(side);
  return fill_template(t_.spatial_icl_answer, {{"obj1", first}, {"side", s}, {"obj2", second}});
}

std::string PromptEngine::render_hallucination_query(std::string_view obj, Medium medium) const {
  require_nonempty(obj, "object");
  const std::string m = to_string(medium);
  return fill_template(t_.hallucination, {{"obj", obj}, {"medium", m}});
}

std::string PromptEngine::render_caption_request(std::string_view category) const {
  require_nonempty(category, "category");
  return fill_template(t_.caption_request, {{"category", category}});
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool contains_word(std::string_view text, std::string_view word) {
  const auto toks = word_tokens(text);
  const std::string w = lower(word);
  return std::find(toks.begin(), toks.end(), w) != toks.end();
}

std::optional<LocationText> find_location(std::string_view text, const ReprScheme& scheme,
                                          LocationForm form) {
  struct Num {
    std::size_t begin, end;
  };
  std::vector<Num> nums;
  for (std::size_t i = 0; i < text.size();) {
    const bool sign = text[i] == '-' && i + 1 < text.size() &&
                      std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (!sign && !std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    if (sign) ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i + 1 < text.size() && text[i] == '.' &&
        std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    }
    nums.push_back({b, i});
  }

  // Group numbers joined by a single comma (plus optional whitespace).
  const std::size_t want = scheme.arity(form);
  std::size_t start = 0;
  while (start < nums.size()) {
    std::size_t end = start + 1;
    while (end < nums.size()) {
      auto gap = text.substr(nums[end - 1].end, nums[end].begin - nums[end - 1].end);
      const auto commas = std::count(gap.begin(), gap.end(), ',');
      const bool only_space = std::all_of(gap.begin(), gap.end(), [](unsigned char c) {
        return c == ',' || std::isspace(c);
      });
      if (commas != 1 || !only_space) break;
      ++end;
    }
    if (end - start == want) {
      std::string canon = "(";
      for (std::size_t k = start; k < end; ++k) {
        if (k > start) canon += ", ";
        canon += text.substr(nums[k].begin, nums[k].end - nums[k].begin);
      }
      canon += ")";
      try {
        parse_location_fields(canon, scheme, form, ParseMode::Lenient);
        return LocationText{canon, scheme, form};
      } catch (const Error&) {
      }
    }
    start = end;
  }
  return std::nullopt;
}

ParsedResponse parse_response(std::string_view raw, Objective expect, const ReprScheme& scheme,
                              LocationForm form) {
  ParsedResponse r;
  r.raw = std::string(raw);
  switch (expect) {
    case Objective::LocPred:
    case Objective::NegPred: {
      if (auto loc = find_location(raw, scheme, form)) {
        r.kind = ResponseKind::Location;
        r.location = std::move(loc);
        return r;
      }
      const std::string low = lower(raw);
      for (auto phrase : kNegationPhrases) {
        if (low.find(phrase) != std::string::npos) {
          r.kind = ResponseKind::Negative;
          return r;
        }
      }
      return r;
    }
    case Objective::SpatialDirect:
    case Objective::SpatialICL: {
      const auto toks = word_tokens(raw);
      std::optional<Side> found;
      for (const auto& [name, side] : kSides) {
        if (std::find(toks.begin(), toks.end(), name) == toks.end()) continue;
        if (found) return r;  // more than one direction word: ambiguous
        found = side;
      }
      if (found) {
        r.kind = ResponseKind::SideAnswer;
        r.side = found;
      }
      return r;
    }
    case Objective::Hallucination: {
      const auto toks = word_tokens(raw);
      const bool yes = std::find(toks.begin(), toks.end(), "yes") != toks.end();
      const bool no = std::find(toks.begin(), toks.end(), "no") != toks.end();
      if (yes != no) {
        r.kind = ResponseKind::YesNo;
        r.polarity = yes ? Polarity::Yes : Polarity::No;
      }
      return r;
    }
    default:
      return r;
  }
}

}  // namespace spatialift
