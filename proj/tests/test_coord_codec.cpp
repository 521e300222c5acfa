// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "spatialift/coord_codec.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/fixtures.hpp"
#include "spatialift/rng.hpp"

using namespace spatialift;

namespace {

// Exact integer arithmetic over coordinates in eighths of a pixel.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// floor(a / b + 1/2)
std::int64_t round_half_up(std::int64_t a, std::int64_t b) { return floor_div(2 * a + b, 2 * b); }

std::string nfp_oracle(std::int64_t eighths, int dim, int decimals) {
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const std::int64_t v = round_half_up(eighths * scale, 8LL * dim);
  std::string frac = std::to_string(v % scale);
  frac.insert(0, decimals - frac.size(), '0');
  return std::to_string(v / scale) + "." + frac;
}

std::int64_t ivb_oracle(std::int64_t eighths, int dim, int bins) {
  return std::min<std::int64_t>(floor_div(eighths * bins, 8LL * dim), bins - 1);
}

// Anchor index along one axis: centres at 14p + 7 in the rescaled square,
// ties toward the lower index.
std::int64_t anchor_oracle(std::int64_t eighths, int dim, int side, int grid, int patch) {
  // u = eighths * side / (8 dim); nearest centre index minimises |u - (p*patch + patch/2)|.
  const std::int64_t num = eighths * side * 2;  // 2u scaled by 8 dim
  const std::int64_t den = 8LL * dim;
  std::int64_t best = 0;
  std::int64_t best_d = -1;
  for (std::int64_t p = 0; p < grid; ++p) {
    const std::int64_t centre2 = (2 * p + 1) * patch;  // twice the centre
    const std::int64_t d = std::llabs(num - centre2 * den);
    if (best_d < 0 || d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

std::string join(std::initializer_list<std::string> parts) {
  std::string out = "(";
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += ", ";
    out += p;
    first = false;
  }
  return out + ")";
}

}  // namespace

TEST_CASE("worked golden vectors") {
  for (const auto& g : fixtures::golden_vectors()) {
    CAPTURE(g.name);
    const auto scheme = ReprScheme::from_id(g.scheme_id);
    const auto t = g.form == LocationForm::BBox ? encode_bbox(g.box, g.dims, scheme)
                                                : encode_point(g.point, g.dims, scheme);
    CHECK(t.text == g.expected);
  }
  const auto a = nearest_anchor({20, 132.5}, {512, 512}, ReprScheme::diga());
  CHECK(a.p == 0);
  CHECK(a.q == 4);
  const auto [cx, cy] = anchor_center(a, ReprScheme::diga());
  CHECK(cx == 7.0);
  CHECK(cy == 63.0);
}

TEST_CASE("nearest anchor examples") {
  const auto diga = ReprScheme::diga();
  auto a = nearest_anchor({7, 63}, {224, 224}, diga);
  CHECK(a.p == 0);
  CHECK(a.q == 4);
  a = nearest_anchor({14, 14}, {224, 224}, diga);
  CHECK(a.p == 0);
  CHECK(a.q == 0);
  a = nearest_anchor({224, 224}, {224, 224}, diga);
  CHECK(a.p == 15);
  CHECK(a.q == 15);
}

TEST_CASE("encodings agree with exact arithmetic") {
  SplitMix64 rng(42);
  const ImageDims dims_list[] = {{224, 224}, {336, 336}, {512, 512}, {640, 480}, {333, 500}};
  for (int i = 0; i < 3000; ++i) {
    const auto dims = dims_list[rng.below(5)];
    const std::int64_t ax = rng.below(8 * dims.width + 1), bx = rng.below(8 * dims.width + 1);
    const std::int64_t ay = rng.below(8 * dims.height + 1), by = rng.below(8 * dims.height + 1);
    const std::int64_t x1 = std::min(ax, bx), x2 = std::max(ax, bx);
    const std::int64_t y1 = std::min(ay, by), y2 = std::max(ay, by);
    const BBox box{x1 / 8.0, y1 / 8.0, x2 / 8.0, y2 / 8.0};
    CAPTURE(to_string(box));

    CHECK(encode_bbox(box, dims, ReprScheme::nfp(4)).text ==
          join({nfp_oracle(x1, dims.width, 4), nfp_oracle(y1, dims.height, 4),
                nfp_oracle(x2, dims.width, 4), nfp_oracle(y2, dims.height, 4)}));
    CHECK(encode_bbox(box, dims, ReprScheme::nfp(2)).text ==
          join({nfp_oracle(x1, dims.width, 2), nfp_oracle(y1, dims.height, 2),
                nfp_oracle(x2, dims.width, 2), nfp_oracle(y2, dims.height, 2)}));
    for (int bins : {100, 224, 999}) {
      CHECK(encode_bbox(box, dims, ReprScheme::ivb(bins)).text ==
            join({std::to_string(ivb_oracle(x1, dims.width, bins)),
                  std::to_string(ivb_oracle(y1, dims.height, bins)),
                  std::to_string(ivb_oracle(x2, dims.width, bins)),
                  std::to_string(ivb_oracle(y2, dims.height, bins))}));
    }
    for (int grid : {16, 24}) {
      const int side = grid * 14;
      const auto scheme = ReprScheme::diga(grid, 14);
      // Centre in eighths is (x1 + x2) / 2; keep sixteenths to stay exact.
      const std::int64_t p = anchor_oracle(x1 + x2, 2 * dims.width, side, grid, 14);
      const std::int64_t q = anchor_oracle(y1 + y2, 2 * dims.height, side, grid, 14);
      // Deviations round(acx - x1 * side / dim) etc. with acx = 14p + 7.
      auto dev = [&](std::int64_t anchor_centre, std::int64_t e, int dim, int sign) {
        // sign * (e * side / (8 dim) - anchor_centre)
        const std::int64_t num = sign * (e * side - anchor_centre * 8LL * dim);
        return std::to_string(round_half_up(num, 8LL * dim));
      };
      const std::int64_t acx = 14 * p + 7, acy = 14 * q + 7;
      CHECK(encode_bbox(box, dims, scheme).text ==
            join({std::to_string(p), std::to_string(q), dev(acx, x1, dims.width, -1),
                  dev(acy, y1, dims.height, -1), dev(acx, x2, dims.width, 1),
                  dev(acy, y2, dims.height, 1)}));
    }
  }
}

TEST_CASE("encode rejects invalid input") {
  CHECK_THROWS_WITH_AS(encode_bbox({30, 120, 10, 145}, {512, 512}, ReprScheme::nfp()),
                       doctest::Contains("x1 > x2"), InvalidArgument);
  CHECK_THROWS_AS(encode_bbox({10, 120, 30, 600}, {512, 512}, ReprScheme::nfp()), InvalidArgument);
  CHECK_THROWS_AS(encode_point({-1, 0}, {512, 512}, ReprScheme::ivb()), InvalidArgument);
  CHECK_THROWS_AS(encode_point({1, 1}, {0, 512}, ReprScheme::ivb()), InvalidArgument);
  CHECK_THROWS_AS(ReprScheme::diga(16, 20), InvalidArgument);
  CHECK_THROWS_AS(ReprScheme::nfp(0), InvalidArgument);
  CHECK_THROWS_AS(ReprScheme::ivb(1), InvalidArgument);
}

TEST_CASE("scheme ids round-trip") {
  for (const auto& s : {ReprScheme::nfp(4), ReprScheme::nfp(2), ReprScheme::ivb(224), ReprScheme::ivb(999),
                        ReprScheme::diga(16, 14), ReprScheme::diga(24, 14)}) {
    CHECK(ReprScheme::from_id(s.id()) == s);
  }
  CHECK_THROWS_AS(ReprScheme::from_id("xyz4"), InvalidArgument);
  CHECK_THROWS_AS(ReprScheme::from_id("nfp"), InvalidArgument);
}

TEST_CASE("decode examples") {
  const auto p = decode_point({"(0.5000, 0.5000)", ReprScheme::nfp(), LocationForm::Point}, {512, 512});
  CHECK(p.cx == 256.0);
  CHECK(p.cy == 256.0);

  const BBox truth{10, 120, 30, 145};
  const auto ivb = decode_bbox({"(4, 52, 13, 63)", ReprScheme::ivb(224), LocationForm::BBox}, {512, 512});
  CHECK(ivb.x1 == doctest::Approx(10.2857).epsilon(1e-4));
  CHECK(ivb.y1 == doctest::Approx(120.0));
  CHECK(ivb.x2 == doctest::Approx(30.8571).epsilon(1e-4));
  CHECK(ivb.y2 == doctest::Approx(145.1429).epsilon(1e-4));
  const double ivb_bound = quantization_error_bound(ReprScheme::ivb(224), 512);
  CHECK(std::abs(ivb.x1 - truth.x1) <= ivb_bound);
  CHECK(std::abs(ivb.y2 - truth.y2) <= ivb_bound);

  const auto diga =
      decode_bbox({"(0, 4, 3, 11, 6, 0)", ReprScheme::diga(), LocationForm::BBox}, {512, 512});
  const double diga_bound = quantization_error_bound(ReprScheme::diga(), 512);
  CHECK(std::abs(diga.x1 - truth.x1) <= diga_bound + 1e-9);
  CHECK(std::abs(diga.y1 - truth.y1) <= diga_bound + 1e-9);
  CHECK(std::abs(diga.x2 - truth.x2) <= diga_bound + 1e-9);
  CHECK(std::abs(diga.y2 - truth.y2) <= diga_bound + 1e-9);
}

TEST_CASE("decode reports malformed text with the token") {
  const ImageDims d{512, 512};
  auto expect_token = [&](const std::string& text, const ReprScheme& s, LocationForm f,
                          const std::string& token) {
    CAPTURE(text);
    try {
      decode_bbox({text, s, f}, d);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.token() == token);
    }
  };
  expect_token("(4, 52, 13)", ReprScheme::ivb(), LocationForm::BBox, "(4, 52, 13)");
  expect_token("(4, 52, 13, 224)", ReprScheme::ivb(), LocationForm::BBox, "224");
  expect_token("(4, x, 13, 63)", ReprScheme::ivb(), LocationForm::BBox, "x");
  expect_token("(16, 4, 3, 11, 6, 0)", ReprScheme::diga(), LocationForm::BBox, "16");
  expect_token("(0.1000, abc, 0.3000, 0.4000)", ReprScheme::nfp(), LocationForm::BBox, "abc");
  try {
    parse_location_fields("(0.1, 0.2000, 0.3000, 0.4000)", ReprScheme::nfp(), LocationForm::BBox,
                          ParseMode::Canonical);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.token() == "0.1");
  }
  CHECK_THROWS_AS(decode_point({"(0.5000, 0.5000, 0.1000)", ReprScheme::nfp(), LocationForm::Point}, d),
                  ParseError);
}

TEST_CASE("degenerate decodes are reported, not repaired") {
  CHECK_THROWS_WITH_AS(
      decode_bbox({"(0.5000, 0.5000, 0.2000, 0.6000)", ReprScheme::nfp(), LocationForm::BBox}, {512, 512}),
      doctest::Contains("degenerate decode"), DegenerateDecode);
  CHECK_THROWS_AS(decode_bbox({"(10, 2, 3, 1)", ReprScheme::ivb(), LocationForm::BBox}, {512, 512}),
                  DegenerateDecode);
}

TEST_CASE("lenient parsing accepts spacing and brackets") {
  const auto f = parse_location_fields("[4,52 , 13,63]", ReprScheme::ivb(), LocationForm::BBox,
                                       ParseMode::Lenient);
  REQUIRE(f.size() == 4);
  CHECK(f[1] == 52.0);
  CHECK_THROWS_AS(parse_location_fields("[4,52 , 13,63]", ReprScheme::ivb(), LocationForm::BBox,
                                        ParseMode::Canonical),
                  ParseError);
}

TEST_CASE("quantization bounds") {
  CHECK(quantization_error_bound(ReprScheme::nfp(4), 512) == doctest::Approx(0.0256));
  CHECK(quantization_error_bound(ReprScheme::ivb(224), 512) == doctest::Approx(512.0 / 224));
  CHECK(quantization_error_bound(ReprScheme::diga(16, 14), 512) == doctest::Approx(0.5 * 512 / 224));
  CHECK(quantization_error_bound(ReprScheme::diga(24, 14), 512) == doctest::Approx(0.5 * 512 / 336));
}

TEST_CASE("token costs") {
  CHECK(numeric_token_cost("12.34") == 5);
  CHECK(numeric_token_cost("0.0195") == 6);
  CHECK(numeric_token_cost("224") == 3);
  CHECK(numeric_token_cost("-5") == 2);
  const auto c = token_cost({"(0.0195, 0.2344, 0.0586, 0.2832)", ReprScheme::nfp(), LocationForm::BBox});
  CHECK(c.coordinates == 24);
  CHECK(c.per_field.size() == 4);
  const auto i = token_cost({"(4, 52, 13, 63)", ReprScheme::ivb(), LocationForm::BBox});
  CHECK(i.coordinates == 7);
  CHECK(i.overhead == c.overhead);
}

TEST_CASE("round trip stays within the quantization bound") {
  SplitMix64 rng(7);
  const ImageDims dims_list[] = {{224, 224}, {336, 336}, {512, 512}, {640, 480}};
  const ReprScheme schemes[] = {ReprScheme::nfp(4), ReprScheme::ivb(224), ReprScheme::diga(16, 14),
                                ReprScheme::diga(24, 14)};
  for (int i = 0; i < 2000; ++i) {
    const auto d = dims_list[rng.below(4)];
    double xa = rng.uniform() * d.width, xb = rng.uniform() * d.width;
    double ya = rng.uniform() * d.height, yb = rng.uniform() * d.height;
    const BBox b{std::min(xa, xb), std::min(ya, yb), std::max(xa, xb), std::max(ya, yb)};
    for (const auto& s : schemes) {
      CAPTURE(s.id());
      CAPTURE(to_string(b));
      const double bx = quantization_error_bound(s, d.width), by = quantization_error_bound(s, d.height);
      const auto p = decode_point(encode_point(center_of(b), d, s), d);
      CHECK(std::abs(p.cx - b.cx()) <= bx + 1e-9);
      CHECK(std::abs(p.cy - b.cy()) <= by + 1e-9);
      const BBox r = decode_bbox(encode_bbox(b, d, s), d);
      CHECK(std::abs(r.x1 - b.x1) <= bx + 1e-9);
      CHECK(std::abs(r.y1 - b.y1) <= by + 1e-9);
      CHECK(std::abs(r.x2 - b.x2) <= bx + 1e-9);
      CHECK(std::abs(r.y2 - b.y2) <= by + 1e-9);
    }
  }
}
