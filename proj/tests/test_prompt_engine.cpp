// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "spatialift/coord_codec.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/prompt_engine.hpp"
#include "spatialift/rng.hpp"

using namespace spatialift;

namespace {

std::size_t count_substr(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

LocationText ivb_text(const std::string& text, LocationForm form = LocationForm::BBox) {
  return LocationText{text, ReprScheme::ivb(224), form};
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("built-in templates are stored verbatim") {
  const auto& t = TemplateSet::builtin();
  const std::vector<std::string> locpred = {
      "Where is the object described {category} located in image in terms of {repr}?",
      "What is the location of object described {category} in terms of {repr}?",
      "Localize the object described {category} in terms of {repr}?",
      "Provide a {repr} for the the object described {category}?",
      "Generate a {repr} for the the object described {category}?",
  };
  CHECK(t.locpred_prompts == locpred);
  CHECK(&t.negpred_prompts() == &t.locpred_prompts);
  const std::vector<std::string> revloc = {
      "Describe the object located at {loc}?",
      "Provide a caption for object at {loc}?",
      "What is at location {loc} in image?",
  };
  CHECK(t.revloc_prompts == revloc);
  CHECK(t.locpred_target == "It is located at {loc}");
  CHECK(t.negpred_target == "There is no such object in the image");
  CHECK(t.revloc_target == "There is a {category}.");
  CHECK(t.spatial_direct == "Which side of {obj1} is {obj2} located?");
  CHECK(t.caption_request ==
        "Describe the {category} in this image using one short sentence, referring to its visual "
        "features and spatial position relative to other objects in image.");
  CHECK(t.hallucination == "Is there {obj} in this {medium}?");
  CHECK_FALSE(t.override_path.has_value());
}

TEST_CASE("fill_template substitutes in one pass") {
  CHECK(fill_template("a {x} b", {{"x", "{x}"}}) == "a {x} b");
  CHECK(fill_template("{x}{y}", {{"x", "{y}"}, {"y", "Y"}}) == "{y}Y");
  CHECK(fill_template("keep {unknown} and {", {{"x", "1"}}) == "keep {unknown} and {");
  CHECK(fill_template("", {{"x", "1"}}).empty());
}

TEST_CASE("render_locpred") {
  PromptEngine eng;
  const auto loc = ivb_text("(4, 52, 13, 63)");
  const auto r = eng.render_locpred("cat", LocationForm::BBox, loc, 0);
  CHECK(r.prompt ==
        "Where is the object described cat located in image in terms of (x1,y1,x2,y2) bbox?");
  CHECK(r.target == "It is located at (4, 52, 13, 63)");
  CHECK(r.objective == Objective::LocPred);
  CHECK(r.template_index == 0);
  CHECK(eng.render_locpred("cat", LocationForm::BBox, loc, 0) == r);

  CHECK_THROWS_AS(eng.render_locpred("", LocationForm::BBox, loc, 0), InvalidArgument);
  CHECK_THROWS_AS(eng.render_locpred("cat", LocationForm::Point, loc, 0), InvalidArgument);

  const auto pt = eng.render_locpred("cat", LocationForm::Point,
                                     ivb_text("(8, 57)", LocationForm::Point), 0);
  CHECK(pt.prompt == "Where is the object described cat located in image in terms of (cx,cy) point?");
}

TEST_CASE("template selection over many seeds is close to uniform") {
  PromptEngine eng;
  const auto loc = ivb_text("(4, 52, 13, 63)");
  std::map<std::size_t, int> hist;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    hist[eng.render_locpred("cat", LocationForm::BBox, loc, s).template_index]++;
  }
  REQUIRE(hist.size() == 5);
  for (const auto& [idx, n] : hist) {
    CHECK(n >= 850);
    CHECK(n <= 1150);
  }
  // Derived per-sample seeds, which is how the builders call the engine.
  hist.clear();
  for (int i = 0; i < 5000; ++i) {
    const auto s = derive_seed(42, "sample-" + std::to_string(i));
    hist[eng.render_negpred("cat", LocationForm::BBox, s).template_index]++;
  }
  REQUIRE(hist.size() == 5);
  for (const auto& [idx, n] : hist) {
    CHECK(n >= 850);
    CHECK(n <= 1150);
  }
}

TEST_CASE("render_negpred prompts match render_locpred prompts") {
  PromptEngine eng;
  const auto n = eng.render_negpred("zebra", LocationForm::BBox, 7);
  CHECK(n.target == "There is no such object in the image");
  CHECK(n.objective == Objective::NegPred);
  CHECK_THROWS_AS(eng.render_negpred("", LocationForm::BBox, 0), InvalidArgument);

  for (std::uint64_t s = 0; s < 200; ++s) {
    for (auto form : {LocationForm::BBox, LocationForm::Point}) {
      const auto loc = form == LocationForm::BBox ? ivb_text("(1, 2, 3, 4)")
                                                  : ivb_text("(1, 2)", LocationForm::Point);
      const auto a = eng.render_locpred("red car", form, loc, s);
      const auto b = eng.render_negpred("red car", form, s);
      CHECK(a.prompt == b.prompt);
      CHECK(a.template_index == b.template_index);
      CHECK(a.target != b.target);
    }
  }
}

TEST_CASE("render_revloc") {
  PromptEngine eng;
  const auto loc = ivb_text("(8, 57)", LocationForm::Point);
  const auto r = eng.render_revloc(loc, "black cat on a sofa", 1);
  CHECK(r.target == "There is a black cat on a sofa.");
  CHECK(r.prompt == "Provide a caption for object at (8, 57)?");
  CHECK(eng.render_revloc(loc, "black cat on a sofa", 1) == r);

  std::set<std::size_t> seen;
  for (std::uint64_t s = 0; s < 3; ++s) seen.insert(eng.render_revloc(loc, "x", s).template_index);
  CHECK(seen.size() == 3);

  CHECK_THROWS_AS(eng.render_revloc(loc, "", 0), InvalidArgument);
  CHECK_THROWS_AS(eng.render_revloc(ivb_text(""), "x", 0), InvalidArgument);
}

TEST_CASE("spatial queries") {
  PromptEngine eng;
  CHECK(eng.render_spatial_query("dog", "table", Axis::LR) == "Which side of dog is table located?");
  CHECK(eng.render_spatial_query("dog", "table", Axis::AB) == "Which side of dog is table located?");
  CHECK_THROWS_AS(eng.render_spatial_query("dog", "dog", Axis::LR), InvalidArgument);
  CHECK_THROWS_AS(eng.render_spatial_query("", "dog", Axis::LR), InvalidArgument);

  const std::array<PromptEngine::QA, 2> icl = {
      PromptEngine::QA{eng.render_spatial_query("cup", "plate", Axis::LR),
                       eng.render_spatial_answer("cup", Side::Left, "plate")},
      PromptEngine::QA{eng.render_spatial_query("plate", "cup", Axis::LR),
                       eng.render_spatial_answer("plate", Side::Right, "cup")},
  };
  const auto q = eng.render_spatial_query("fork", "cup", Axis::LR, icl);
  CHECK(count_substr(q, "Q:") == 3);
  CHECK(count_substr(q, "A:") == 2);
  CHECK(q ==
        "Q: Which side of cup is plate located? A: The cup is located to the left of plate. "
        "Q: Which side of plate is cup located? A: The plate is located to the right of cup. "
        "Q: Which side of fork is cup located?");

  const std::array<PromptEngine::QA, 2> ab = {
      PromptEngine::QA{"Which side of a is b located?",
                       eng.render_spatial_answer("a", Side::Above, "b")},
      PromptEngine::QA{"Which side of b is a located?",
                       eng.render_spatial_answer("b", Side::Below, "a")},
  };
  const auto qab = eng.render_spatial_query("c", "a", Axis::AB, ab);
  CHECK(qab.find("Which side of c is a located?") != std::string::npos);
  CHECK(qab.find("located to the above of b") != std::string::npos);

  auto bad = icl;
  bad[1].second.clear();
  CHECK_THROWS_AS(eng.render_spatial_query("fork", "cup", Axis::LR, bad), InvalidArgument);
}

TEST_CASE("hallucination and caption requests") {
  PromptEngine eng;
  CHECK(eng.render_hallucination_query("a giraffe", Medium::Image) ==
        "Is there a giraffe in this image?");
  CHECK(eng.render_hallucination_query("a piano", Medium::Video) == "Is there a piano in this video?");
  CHECK_THROWS_AS(eng.render_hallucination_query("", Medium::Image), InvalidArgument);

  CHECK(eng.render_caption_request("dog") ==
        "Describe the dog in this image using one short sentence, referring to its visual "
        "features and spatial position relative to other objects in image.");
  CHECK_THROWS_AS(eng.render_caption_request(""), InvalidArgument);

  // Template diff: only the placeholder span changes.
  const std::string tmpl = eng.templates().caption_request;
  const auto at = tmpl.find("{category}");
  for (std::string cat : {"x", "traffic light", "{category}", "a}b{c"}) {
    const auto out = eng.render_caption_request(cat);
    CHECK(out.substr(0, at) == tmpl.substr(0, at));
    CHECK(out.substr(at, cat.size()) == cat);
    CHECK(out.substr(at + cat.size()) == tmpl.substr(at + 10));
  }
}

TEST_CASE("parse_response on location objectives") {
  const auto ivb = ReprScheme::ivb(224);
  auto p = parse_response("It is located at (4, 52, 13, 63).", Objective::LocPred, ivb,
                          LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::Location);
  CHECK(p.location->text == "(4, 52, 13, 63)");
  CHECK(p.raw == "It is located at (4, 52, 13, 63).");

  p = parse_response("sure: [4,52, 13,63]", Objective::LocPred, ivb, LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::Location);
  CHECK(p.location->text == "(4, 52, 13, 63)");

  // A point-arity tuple is not a box.
  p = parse_response("at (8, 57) maybe", Objective::LocPred, ivb, LocationForm::BBox);
  CHECK(p.kind == ResponseKind::FreeText);

  for (std::string neg : {"There is no such object in the image", "there is no cat here",
                          "The object is not present.", "It does not appear in the picture"}) {
    p = parse_response(neg, Objective::NegPred, ivb, LocationForm::BBox);
    CHECK(p.kind == ResponseKind::Negative);
    CHECK_FALSE(p.location.has_value());
  }
  p = parse_response("a cat, a dog", Objective::LocPred, ivb, LocationForm::BBox);
  CHECK(p.kind == ResponseKind::FreeText);
}

TEST_CASE("parse_response on spatial and yes/no objectives") {
  const auto s = ReprScheme::nfp();
  auto p = parse_response("The dog is located to the left of the table.", Objective::SpatialDirect,
                          s, LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::SideAnswer);
  CHECK(*p.side == Side::Left);
  p = parse_response("The dog is left of the cat but right of the car.", Objective::SpatialDirect,
                     s, LocationForm::BBox);
  CHECK(p.kind == ResponseKind::FreeText);
  CHECK_FALSE(p.side.has_value());
  p = parse_response("ABOVE it", Objective::SpatialICL, s, LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::SideAnswer);
  CHECK(*p.side == Side::Above);
  p = parse_response("Leftover pizza", Objective::SpatialDirect, s, LocationForm::BBox);
  CHECK(p.kind == ResponseKind::FreeText);

  p = parse_response("Yes, there is.", Objective::Hallucination, s, LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::YesNo);
  CHECK(*p.polarity == Polarity::Yes);
  p = parse_response("no.", Objective::Hallucination, s, LocationForm::BBox);
  REQUIRE(p.kind == ResponseKind::YesNo);
  CHECK(*p.polarity == Polarity::No);
  p = parse_response("yes and no", Objective::Hallucination, s, LocationForm::BBox);
  CHECK(p.kind == ResponseKind::FreeText);
}

TEST_CASE("parse_response is total and keeps the raw text") {
  SplitMix64 rng(99);
  const std::array<Objective, 8> objs = {Objective::LocPred,       Objective::NegPred,
                                         Objective::RevLoc,        Objective::SpatialDirect,
                                         Objective::SpatialICL,    Objective::Hallucination,
                                         Objective::CaptionRequest, Objective::VQA};
  const std::string alphabet = "0123456789-.,()[] abcxyz\n\t\xff";
  for (int i = 0; i < 3000; ++i) {
    std::string raw;
    const auto len = rng.next() % 40;
    for (std::uint64_t k = 0; k < len; ++k) raw += alphabet[rng.next() % alphabet.size()];
    for (auto o : objs) {
      for (const auto& sch : {ReprScheme::nfp(), ReprScheme::ivb(), ReprScheme::diga()}) {
        ParsedResponse p;
        CHECK_NOTHROW(p = parse_response(raw, o, sch, LocationForm::BBox));
        CHECK(p.raw == raw);
        // Only fields implied by the kind are set.
        CHECK(p.location.has_value() == (p.kind == ResponseKind::Location));
        CHECK(p.side.has_value() == (p.kind == ResponseKind::SideAnswer));
        CHECK(p.polarity.has_value() == (p.kind == ResponseKind::YesNo));
      }
    }
  }
}

TEST_CASE("rendered targets parse back to the encoded location") {
  PromptEngine eng;
  SplitMix64 rng(5);
  const std::array<ReprScheme, 4> schemes = {ReprScheme::nfp(4), ReprScheme::nfp(2),
                                             ReprScheme::ivb(224), ReprScheme::diga(16, 14)};
  for (int i = 0; i < 500; ++i) {
    const ImageDims dims{static_cast<int>(100 + rng.next() % 900),
                         static_cast<int>(100 + rng.next() % 900)};
    const double x1 = rng.uniform() * dims.width * 0.9;
    const double y1 = rng.uniform() * dims.height * 0.9;
    const BBox b{x1, y1, x1 + 1 + rng.uniform() * (dims.width - x1 - 1),
                 y1 + 1 + rng.uniform() * (dims.height - y1 - 1)};
    for (const auto& sch : schemes) {
      for (auto form : {LocationForm::BBox, LocationForm::Point}) {
        const auto loc = form == LocationForm::BBox
                             ? encode_bbox(b, dims, sch)
                             : encode_point(PointLoc{b.cx(), b.cy()}, dims, sch);
        const auto r = eng.render_locpred("thing", form, loc, i);
        const auto p = parse_response(r.target, Objective::LocPred, sch, form);
        REQUIRE(p.kind == ResponseKind::Location);
        CHECK(*p.location == loc);
      }
    }
  }
}

TEST_CASE("template override files") {
  const auto ok = write_temp("spatialift_tmpl_ok.txt",
                             "# experiment\n[revloc]\nWhat is at {loc}?\n\n[hallucination]\n"
                             "Do you see {obj} in the {medium}?\n");
  const auto t = TemplateSet::load_override(ok);
  CHECK(t.revloc_prompts == std::vector<std::string>{"What is at {loc}?"});
  CHECK(t.hallucination == "Do you see {obj} in the {medium}?");
  CHECK(t.locpred_prompts == TemplateSet::builtin().locpred_prompts);
  REQUIRE(t.override_path.has_value());
  CHECK(*t.override_path == ok);
  PromptEngine eng(t);
  CHECK(eng.render_hallucination_query("a cat", Medium::Video) == "Do you see a cat in the video?");

  CHECK_THROWS_AS(TemplateSet::load_override(write_temp("spatialift_tmpl_a.txt", "[negpred]\nx\n")),
                  ConfigError);
  CHECK_THROWS_AS(TemplateSet::load_override(write_temp("spatialift_tmpl_b.txt", "stray line\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      TemplateSet::load_override(write_temp("spatialift_tmpl_c.txt", "[hallucination]\na\nb\n")),
      ConfigError);
  CHECK_THROWS_AS(TemplateSet::load_override("/nonexistent/spatialift/templates.txt"), ConfigError);

  TemplateSet empty = TemplateSet::builtin();
  empty.revloc_prompts.clear();
  CHECK_THROWS_AS(PromptEngine{empty}, ConfigError);
}

TEST_CASE("enum string round trips") {
  for (auto o : {Objective::LocPred, Objective::NegPred, Objective::RevLoc, Objective::SpatialDirect,
                 Objective::SpatialICL, Objective::Hallucination, Objective::CaptionRequest,
                 Objective::VQA}) {
    CHECK(objective_from_string(to_string(o)) == o);
  }
  for (auto s : {Side::Left, Side::Right, Side::Above, Side::Below}) {
    CHECK(side_from_string(to_string(s)) == s);
    CHECK(opposite(opposite(s)) == s);
    CHECK(opposite(s) != s);
  }
  CHECK(opposite(Side::Left) == Side::Right);
  CHECK(opposite(Side::Above) == Side::Below);
  CHECK(axis_from_string("AB") == Axis::AB);
  CHECK(medium_from_string("video") == Medium::Video);
  CHECK(polarity_from_string("yes") == Polarity::Yes);
  CHECK_THROWS(objective_from_string("Bogus"));
}
