// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/coord_codec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include "spatialift/errors.hpp"

namespace spatialift {

namespace {

using Wide = long double;

std::int64_t pow10i(int n) {
  std::int64_t r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

// floor(v + 1/2); halves go towards +inf.
std::int64_t round_half_up(Wide v) { return static_cast<std::int64_t>(std::floor(v + 0.5L)); }

std::string join(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  out += ")";
  return out;
}

std::string nfp_field(double coord, int dim, int decimals) {
  const std::int64_t scale = pow10i(decimals);
  const std::int64_t k = round_half_up(static_cast<Wide>(coord) * scale / dim);
  std::string frac = std::to_string(k % scale);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return std::to_string(k / scale) + "." + frac;
}

std::int64_t ivb_bin(double coord, int dim, int bins) {
  const auto k = static_cast<std::int64_t>(std::floor(static_cast<Wide>(coord) * bins / dim));
  return std::clamp<std::int64_t>(k, 0, bins - 1);
}

// Coordinates rescaled into the DIGA square.
Wide to_square(double coord, int dim, const ReprScheme& s) {
  return static_cast<Wide>(coord) * s.square_side() / dim;
}

void require_kind(const ReprScheme& s, SchemeKind k, const char* op) {
  if (s.kind() != k) throw InvalidArgument(std::string(op) + " requires scheme " + to_string(k));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_token(std::string_view t) {
  if (!t.empty() && t.front() == '-') t.remove_prefix(1);
  return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Digits with exactly one '.', e.g. "0.25" or "1.0000".
bool is_decimal_token(std::string_view t) {
  const auto dot = t.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == t.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i != dot && !std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  }
  return true;
}

bool is_canonical_nfp(std::string_view t, int decimals) {
  if (t.size() != static_cast<std::size_t>(decimals) + 2) return false;
  if ((t[0] != '0' && t[0] != '1') || t[1] != '.') return false;
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    if (t[0] == '1' && t[i] != '0') return false;
  }
  return true;
}

std::vector<std::string_view> split_fields(std::string_view text, ParseMode mode) {
  std::string_view body = mode == ParseMode::Lenient ? trim(text) : text;
  const bool paren = body.size() >= 2 && body.front() == '(' && body.back() == ')';
  const bool square = body.size() >= 2 && body.front() == '[' && body.back() == ']';
  if (paren || (mode == ParseMode::Lenient && square)) {
    body = body.substr(1, body.size() - 2);
  } else if (mode == ParseMode::Canonical) {
    throw ParseError("location must be enclosed in parentheses", std::string(text));
  }
  std::vector<std::string_view> out;
  const std::string_view sep = mode == ParseMode::Canonical ? ", " : ",";
  std::size_t pos = 0;
  while (true) {
    const auto next = body.find(sep, pos);
    auto field = body.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    out.push_back(mode == ParseMode::Lenient ? trim(field) : field);
    if (next == std::string_view::npos) break;
    pos = next + sep.size();
  }
  return out;
}

}  // namespace

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::NFP: return "nfp";
    case SchemeKind::IVB: return "ivb";
    case SchemeKind::DIGA: return "diga";
  }
  return "?";
}

std::string to_string(LocationForm f) { return f == LocationForm::Point ? "point" : "bbox"; }

SchemeKind scheme_kind_from_string(std::string_view s) {
  if (s == "nfp") return SchemeKind::NFP;
  if (s == "ivb") return SchemeKind::IVB;
  if (s == "diga") return SchemeKind::DIGA;
  throw InvalidArgument("unknown scheme '" + std::string(s) + "'");
}

LocationForm location_form_from_string(std::string_view s) {
  if (s == "point") return LocationForm::Point;
  if (s == "bbox") return LocationForm::BBox;
  throw InvalidArgument("unknown location form '" + std::string(s) + "'");
}

ReprScheme ReprScheme::nfp(int decimals) {
  if (decimals < 1 || decimals > 15) throw InvalidArgument("NFP decimals must be in [1, 15]");
  ReprScheme s;
  s.kind_ = SchemeKind::NFP;
  s.decimals_ = decimals;
  return s;
}

ReprScheme ReprScheme::ivb(int bins) {
  if (bins < 2) throw InvalidArgument("IVB needs at least 2 bins");
  ReprScheme s;
  s.kind_ = SchemeKind::IVB;
  s.bins_ = bins;
  return s;
}

ReprScheme ReprScheme::diga(int grid, int patch_size) {
  if (grid <= 0 || patch_size <= 0) throw InvalidArgument("DIGA grid and patch must be positive");
  const int side = grid * patch_size;
  if (side != 224 && side != 336) {
    throw InvalidArgument("DIGA square side must be 224 or 336, got " + std::to_string(side));
  }
  ReprScheme s;
  s.kind_ = SchemeKind::DIGA;
  s.grid_ = grid;
  s.patch_ = patch_size;
  return s;
}

std::size_t ReprScheme::arity(LocationForm form) const {
  const std::size_t base = form == LocationForm::Point ? 2 : 4;
  return kind_ == SchemeKind::DIGA ? base + 2 : base;
}

std::string ReprScheme::id() const {
  switch (kind_) {
    case SchemeKind::NFP: return "nfp" + std::to_string(decimals_);
    case SchemeKind::IVB: return "ivb" + std::to_string(bins_);
    case SchemeKind::DIGA: return "diga" + std::to_string(grid_) + "x" + std::to_string(patch_);
  }
  return "?";
}

ReprScheme ReprScheme::from_id(std::string_view id) {
  auto number = [&](std::string_view digits) {
    if (digits.empty() || !is_integer_token(digits) || digits.front() == '-') {
      throw InvalidArgument("bad scheme id '" + std::string(id) + "'");
    }
    return std::stoi(std::string(digits));
  };
  if (id.starts_with("nfp")) return nfp(number(id.substr(3)));
  if (id.starts_with("ivb")) return ivb(number(id.substr(3)));
  if (id.starts_with("diga")) {
    auto rest = id.substr(4);
    auto x = rest.find('x');
    if (x == std::string_view::npos) return diga(number(rest));
    return diga(number(rest.substr(0, x)), number(rest.substr(x + 1)));
  }
  throw InvalidArgument("bad scheme id '" + std::string(id) + "'");
}

AnchorIndex nearest_anchor(const PointLoc& p, const ImageDims& dims, const ReprScheme& scheme) {
  require_kind(scheme, SchemeKind::DIGA, "nearest_anchor");
  validate(p, dims);
  const int patch = scheme.patch_size();
  const Wide half = patch / 2.0L;
  // Squared distance is separable over the grid, so the argmin factorises
  // per axis; ties go to the lower index.
  auto best = [&](Wide u) {
    int lo = static_cast<int>(std::floor((u - half) / patch));
    lo = std::clamp(lo, 0, scheme.grid() - 1);
    const int hi = std::min(lo + 1, scheme.grid() - 1);
    const Wide dlo = u - (lo * patch + half);
    const Wide dhi = u - (hi * patch + half);
    return dhi * dhi < dlo * dlo ? hi : lo;
  };
  return {best(to_square(p.cx, dims.width, scheme)), best(to_square(p.cy, dims.height, scheme))};
}

std::pair<double, double> anchor_center(const AnchorIndex& a, const ReprScheme& scheme) {
  const double half = scheme.patch_size() / 2.0;
  return {a.p * scheme.patch_size() + half, a.q * scheme.patch_size() + half};
}

LocationText encode_bbox(const BBox& b, const ImageDims& dims, const ReprScheme& scheme) {
  validate(b, dims);
  std::vector<std::string> f;
  switch (scheme.kind()) {
    case SchemeKind::NFP:
      f = {nfp_field(b.x1, dims.width, scheme.decimals()),
           nfp_field(b.y1, dims.height, scheme.decimals()),
           nfp_field(b.x2, dims.width, scheme.decimals()),
           nfp_field(b.y2, dims.height, scheme.decimals())};
      break;
    case SchemeKind::IVB:
      f = {std::to_string(ivb_bin(b.x1, dims.width, scheme.bins())),
           std::to_string(ivb_bin(b.y1, dims.height, scheme.bins())),
           std::to_string(ivb_bin(b.x2, dims.width, scheme.bins())),
           std::to_string(ivb_bin(b.y2, dims.height, scheme.bins()))};
      break;
    case SchemeKind::DIGA: {
      const auto a = nearest_anchor(center_of(b), dims, scheme);
      const auto [acx, acy] = anchor_center(a, scheme);
      f = {std::to_string(a.p), std::to_string(a.q),
           std::to_string(round_half_up(acx - to_square(b.x1, dims.width, scheme))),
           std::to_string(round_half_up(acy - to_square(b.y1, dims.height, scheme))),
           std::to_string(round_half_up(to_square(b.x2, dims.width, scheme) - acx)),
           std::to_string(round_half_up(to_square(b.y2, dims.height, scheme) - acy))};
      break;
    }
  }
  return {join(f), scheme, LocationForm::BBox};
}

LocationText encode_point(const PointLoc& p, const ImageDims& dims, const ReprScheme& scheme) {
  validate(p, dims);
  std::vector<std::string> f;
  switch (scheme.kind()) {
    case SchemeKind::NFP:
      f = {nfp_field(p.cx, dims.width, scheme.decimals()),
           nfp_field(p.cy, dims.height, scheme.decimals())};
      break;
    case SchemeKind::IVB:
      f = {std::to_string(ivb_bin(p.cx, dims.width, scheme.bins())),
           std::to_string(ivb_bin(p.cy, dims.height, scheme.bins()))};
      break;
    case SchemeKind::DIGA: {
      const auto a = nearest_anchor(p, dims, scheme);
      const auto [acx, acy] = anchor_center(a, scheme);
      f = {std::to_string(a.p), std::to_string(a.q),
           std::to_string(round_half_up(to_square(p.cx, dims.width, scheme) - acx)),
           std::to_string(round_half_up(to_square(p.cy, dims.height, scheme) - acy))};
      break;
    }
  }
  return {join(f), scheme, LocationForm::Point};
}

std::vector<double> parse_location_fields(std::string_view text, const ReprScheme& scheme,
                                          LocationForm form, ParseMode mode) {
  const auto fields = split_fields(text, mode);
  const std::size_t want = scheme.arity(form);
  if (fields.size() != want) {
    throw ParseError("expected " + std::to_string(want) + " fields for " + scheme.id() + " " +
                         to_string(form) + ", got " + std::to_string(fields.size()),
                     std::string(text));
  }
  std::vector<double> out;
  out.reserve(want);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string tok(fields[i]);
    if (scheme.kind() == SchemeKind::NFP) {
      const bool ok = mode == ParseMode::Canonical ? is_canonical_nfp(tok, scheme.decimals())
                                                   : (is_decimal_token(tok) || is_integer_token(tok));
      if (!ok) throw ParseError("not a normalized coordinate", tok);
      const double v = std::stod(tok);
      if (v < 0.0 || v > 1.0) throw ParseError("normalized coordinate outside [0, 1]", tok);
      out.push_back(v);
      continue;
    }
    if (!is_integer_token(tok)) throw ParseError("not an integer", tok);
    if (tok.size() > 12) throw ParseError("integer out of range", tok);
    const long long v = std::stoll(tok);
    if (scheme.kind() == SchemeKind::IVB) {
      if (v < 0 || v >= scheme.bins()) {
        throw ParseError("bin index outside [0, " + std::to_string(scheme.bins() - 1) + "]", tok);
      }
    } else if (i < 2 && (v < 0 || v >= scheme.grid())) {
      throw ParseError("anchor index outside [0, " + std::to_string(scheme.grid() - 1) + "]", tok);
    }
    out.push_back(static_cast<double>(v));
  }
  return out;
}

namespace {

struct Decoded {
  std::vector<double> xs, ys;
};

Decoded decode_fields(const LocationText& t, const ImageDims& dims) {
  validate(dims);
  const auto v = parse_location_fields(t.text, t.scheme, t.form, ParseMode::Lenient);
  const auto& s = t.scheme;
  Decoded d;
  switch (s.kind()) {
    case SchemeKind::NFP:
      for (std::size_t i = 0; i < v.size(); i += 2) {
        d.xs.push_back(v[i] * dims.width);
        d.ys.push_back(v[i + 1] * dims.height);
      }
      break;
    case SchemeKind::IVB:
      for (std::size_t i = 0; i < v.size(); i += 2) {
        d.xs.push_back((v[i] + 0.5) * dims.width / s.bins());
        d.ys.push_back((v[i + 1] + 0.5) * dims.height / s.bins());
      }
      break;
    case SchemeKind::DIGA: {
      const auto [acx, acy] =
          anchor_center({static_cast<int>(v[0]), static_cast<int>(v[1])}, s);
      const double sx = static_cast<double>(dims.width) / s.square_side();
      const double sy = static_cast<double>(dims.height) / s.square_side();
      if (t.form == LocationForm::Point) {
        d.xs.push_back((acx + v[2]) * sx);
        d.ys.push_back((acy + v[3]) * sy);
      } else {
        d.xs = {(acx - v[2]) * sx, (acx + v[4]) * sx};
        d.ys = {(acy - v[3]) * sy, (acy + v[5]) * sy};
      }
      break;
    }
  }
  for (double x : d.xs) {
    if (x < 0 || x > dims.width) throw DegenerateDecode("degenerate decode: x outside image in " + t.text);
  }
  for (double y : d.ys) {
    if (y < 0 || y > dims.height) throw DegenerateDecode("degenerate decode: y outside image in " + t.text);
  }
  return d;
}

}  // namespace

BBox decode_bbox(const LocationText& t, const ImageDims& dims) {
  if (t.form != LocationForm::BBox) throw InvalidArgument("decode_bbox on a point location");
  const auto d = decode_fields(t, dims);
  BBox b{d.xs[0], d.ys[0], d.xs[1], d.ys[1]};
  if (b.x1 > b.x2 || b.y1 > b.y2) throw DegenerateDecode("degenerate decode: " + t.text);
  return b;
}

PointLoc decode_point(const LocationText& t, const ImageDims& dims) {
  if (t.form != LocationForm::Point) throw InvalidArgument("decode_point on a bbox location");
  const auto d = decode_fields(t, dims);
  return {d.xs[0], d.ys[0]};
}

double quantization_error_bound(const ReprScheme& scheme, int dim) {
  switch (scheme.kind()) {
    case SchemeKind::NFP: return 0.5 * std::pow(10.0, -scheme.decimals()) * dim;
    case SchemeKind::IVB: return static_cast<double>(dim) / scheme.bins();
    case SchemeKind::DIGA: return 0.5 * dim / scheme.square_side();
  }
  return 0;
}

std::size_t numeric_token_cost(std::string_view number) {
  return static_cast<std::size_t>(std::count_if(number.begin(), number.end(), [](unsigned char c) {
    return std::isdigit(c) || c == '.' || c == '-' || c == '+';
  }));
}

TokenCost token_cost(const LocationText& t) {
  TokenCost cost;
  for (auto field : split_fields(t.text, ParseMode::Lenient)) {
    const auto n = numeric_token_cost(field);
    cost.per_field.push_back(n);
    cost.coordinates += n;
  }
  for (unsigned char c : t.text) {
    if (!std::isspace(c) && !std::isdigit(c) && c != '.' && c != '-' && c != '+') ++cost.overhead;
  }
  return cost;
}

}  // namespace spatialift
