// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/model_gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "parallel.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/rng.hpp"

namespace spatialift {

using json = nlohmann::ordered_json;

ModelResponse ModelResponse::ok(std::string id, std::string text) {
  return {std::move(id), std::move(text), ResponseStatus::Ok, std::nullopt};
}

ModelResponse ModelResponse::error(std::string id, std::string detail) {
  return {std::move(id), {}, ResponseStatus::Error, std::move(detail)};
}

void SamplingConfig::validate() const {
  if (!(temperature > 0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be positive");
  }
  if (max_new_tokens <= 0) throw InvalidArgument("max_new_tokens must be positive");
}

std::string encode_wire_request(const ModelRequest& req, const SamplingConfig& cfg) {
  json j;
  j["request_id"] = req.request_id;
  j["media_ref"] = req.media_ref;
  j["prompt"] = req.prompt;
  j["sampling"] = {{"temperature", cfg.temperature}, {"max_new_tokens", cfg.max_new_tokens}};
  return j.dump();
}

SendResult decode_wire_reply(const std::string& body, const std::string& expected_id) {
  using K = SendResult::Kind;
  const auto j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return {K::Permanent, "malformed reply: not a JSON object"};
  if (!j.contains("request_id") || !j["request_id"].is_string()) {
    return {K::Permanent, "malformed reply: missing request_id"};
  }
  if (j["request_id"].get<std::string>() != expected_id) {
    return {K::Permanent, "malformed reply: request_id mismatch"};
  }
  if (j.contains("text") && j["text"].is_string()) return {K::Ok, j["text"].get<std::string>()};
  if (j.contains("error")) {
    return {K::Permanent, j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump()};
  }
  return {K::Permanent, "malformed reply: neither text nor error"};
}

// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(std::string endpoint_url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const std::string scheme = "http://";
  if (!endpoint_url.starts_with(scheme)) {
    throw ConfigError("endpoint must be an http:// URL: " + endpoint_url);
  }
  const auto slash = endpoint_url.find('/', scheme.size());
  base_ = endpoint_url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint_url.substr(slash);
}

SendResult HttpTransport::send(const ModelRequest& req, const SamplingConfig& cfg) {
  using K = SendResult::Kind;
  httplib::Client client(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Post(path_, encode_wire_request(req, cfg), "application/json");
  if (!res) return {K::Transient, "transport error: " + httplib::to_string(res.error())};
  if (res->status == 429 || res->status >= 500) {
    return {K::Transient, "server status " + std::to_string(res->status)};
  }
  if (res->status != 200) {
    // The body may still carry a structured {request_id, error} reply.
    auto parsed = decode_wire_reply(res->body, req.request_id);
    if (parsed.kind == K::Permanent && !parsed.payload.starts_with("malformed")) return parsed;
    return {K::Permanent, "server status " + std::to_string(res->status)};
  }
  return decode_wire_reply(res->body, req.request_id);
}

// ---------------------------------------------------------------------------

namespace {

void check_unique_ids(const std::vector<ModelRequest>& requests) {
  if (requests.empty()) throw InvalidArgument("empty request batch");
  std::set<std::string> seen;
  for (const auto& r : requests) {
    if (!seen.insert(r.request_id).second) {
      throw InvalidArgument("duplicate request_id in batch: " + r.request_id);
    }
  }
}

}  // namespace

std::vector<ModelResponse> query_batch(const std::vector<ModelRequest>& requests,
                                       const SamplingConfig& cfg, RequestTransport& transport,
                                       const QueryOptions& opts) {
  check_unique_ids(requests);
  cfg.validate();
  const auto sleep = opts.sleep ? opts.sleep : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
  const int attempts = std::max(1, opts.max_attempts);

  std::vector<ModelResponse> out(requests.size());
  detail::parallel_for(requests.size(), opts.max_inflight, [&](std::size_t i) {
    const auto& req = requests[i];
    auto backoff = opts.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      SendResult r;
      try {
        r = transport.send(req, cfg);
      } catch (const std::exception& e) {
        r = {SendResult::Kind::Transient, std::string("transport exception: ") + e.what()};
      }
      if (r.kind == SendResult::Kind::Ok) {
        out[i] = ModelResponse::ok(req.request_id, std::move(r.payload));
        return;
      }
      last_error = std::move(r.payload);
      if (r.kind == SendResult::Kind::Permanent) break;
      if (attempt < attempts) {
        sleep(backoff);
        backoff = std::min(opts.max_backoff,
                           std::chrono::milliseconds(static_cast<long long>(
                               static_cast<double>(backoff.count()) * opts.backoff_factor)));
      }
    }
    out[i] = ModelResponse::error(req.request_id, last_error);
  });
  return out;
}

std::vector<ModelResponse> query_batch_files(const std::vector<ModelRequest>& requests,
                                             const SamplingConfig& cfg,
                                             const FileBatchOptions& opts) {
  namespace fs = std::filesystem;
  check_unique_ids(requests);
  cfg.validate();
  fs::create_directories(opts.directory);
  const auto req_path = opts.directory / (opts.batch_name + ".req.jsonl");
  const auto resp_path = opts.directory / (opts.batch_name + ".resp.jsonl");
  const auto done_path = opts.directory / (opts.batch_name + ".done");
  {
    const auto tmp = fs::path(req_path.string() + ".tmp");
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write " + tmp.string());
    for (const auto& r : requests) os << encode_wire_request(r, cfg) << '\n';
    os.close();
    fs::rename(tmp, req_path);
  }

  const auto deadline = std::chrono::steady_clock::now() + opts.timeout;
  while (!fs::exists(done_path)) {
    if (std::chrono::steady_clock::now() >= deadline) {
      std::vector<ModelResponse> out;
      for (const auto& r : requests) {
        out.push_back(ModelResponse::error(r.request_id, "file batch timed out"));
      }
      return out;
    }
    std::this_thread::sleep_for(opts.poll_interval);
  }

  std::map<std::string, SendResult> replies;
  std::ifstream in(resp_path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("request_id") || !j["request_id"].is_string()) continue;
    const auto id = j["request_id"].get<std::string>();
    replies.emplace(id, decode_wire_reply(line, id));
  }
  std::vector<ModelResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    auto it = replies.find(r.request_id);
    if (it == replies.end()) {
      out.push_back(ModelResponse::error(r.request_id, "no reply in response file"));
    } else if (it->second.kind == SendResult::Kind::Ok) {
      out.push_back(ModelResponse::ok(r.request_id, it->second.payload));
    } else {
      out.push_back(ModelResponse::error(r.request_id, it->second.payload));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string ground_truth_id(const GroundTruth& gt) {
  return std::visit([](const auto& g) -> std::string {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, SpatialBenchItem> || std::is_same_v<T, HallucinationItem> ||
                  std::is_same_v<T, LocationTruth> || std::is_same_v<T, VqaTruth> ||
                  std::is_same_v<T, RegionTruth>) {
      return g.item_id;
    }
  }, gt);
}

ModelResponse oracle_mock(const ModelRequest& req, const GroundTruth& gt) {
  const auto id = ground_truth_id(gt);
  if (id != req.request_id) {
    return ModelResponse::error(req.request_id, "ground truth is for item '" + id + "'");
  }
  return std::visit(
      [&](const auto& g) -> ModelResponse {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, SpatialBenchItem>) {
          return ModelResponse::ok(req.request_id, "The " + g.query.name + " is located to the " +
                                                       to_string(g.gt_keyword) + " of " +
                                                       g.ref.name + ".");
        } else if constexpr (std::is_same_v<T, HallucinationItem>) {
          return ModelResponse::ok(req.request_id, g.gt == Polarity::Yes ? "Yes" : "No");
        } else if constexpr (std::is_same_v<T, VqaTruth>) {
          return ModelResponse::ok(req.request_id, g.answer);
        } else if constexpr (std::is_same_v<T, RegionTruth>) {
          return ModelResponse::ok(req.request_id, g.caption);
        } else {
          std::string loc;
          try {
            if (std::holds_alternative<std::monostate>(g.where)) {
              return ModelResponse::ok(req.request_id, "There is no such object in the image.");
            } else if (auto* b = std::get_if<BBox>(&g.where)) {
              loc = g.form == LocationForm::BBox ? encode_bbox(*b, g.dims, g.scheme).text
                                                 : encode_point(center_of(*b), g.dims, g.scheme).text;
            } else if (auto* p = std::get_if<PointLoc>(&g.where)) {
              loc = encode_point(*p, g.dims, g.scheme).text;
            } else {
              loc = std::get<LocationText>(g.where).text;
            }
          } catch (const Error& e) {
            return ModelResponse::error(req.request_id, e.what());
          }
          return ModelResponse::ok(req.request_id, "It is located at " + loc + ".");
        }
      },
      gt);
}

ModelResponse random_mock(const ModelRequest& req, const AnswerSpace& space, std::uint64_t seed) {
  SplitMix64 rng(seed, req.request_id);
  switch (space.kind) {
    case AnswerSpace::Kind::LeftRight:
      return ModelResponse::ok(req.request_id, rng.below(2) ? "right" : "left");
    case AnswerSpace::Kind::AboveBelow:
      return ModelResponse::ok(req.request_id, rng.below(2) ? "below" : "above");
    case AnswerSpace::Kind::YesNo:
      return ModelResponse::ok(req.request_id, rng.below(2) ? "No" : "Yes");
    case AnswerSpace::Kind::Location: {
      const double w = space.dims.width, h = space.dims.height;
      double xa = rng.uniform() * w, xb = rng.uniform() * w;
      double ya = rng.uniform() * h, yb = rng.uniform() * h;
      const BBox b{std::min(xa, xb), std::min(ya, yb), std::max(xa, xb), std::max(ya, yb)};
      const auto loc = space.form == LocationForm::BBox
                           ? encode_bbox(b, space.dims, space.scheme)
                           : encode_point(center_of(b), space.dims, space.scheme);
      return ModelResponse::ok(req.request_id, "It is located at " + loc.text + ".");
    }
  }
  return ModelResponse::error(req.request_id, "unknown answer space");
}

// ---------------------------------------------------------------------------

void TokenGrid::validate() const {
  if (frames == 0 || spatial == 0 || features == 0) throw InvalidArgument("token grid axes must be non-empty");
  if (values.size() != frames * spatial * features) {
    throw InvalidArgument("token grid value count does not match its shape");
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("token grid contains non-finite values");
  }
}

PooledTokens spatiotemporal_pool(const TokenGrid& grid, int jobs) {
  grid.validate();
  const std::size_t nf = grid.frames, ns = grid.spatial, d = grid.features;
  PooledTokens out;
  out.rows = ns + nf;
  out.features = d;
  out.values.assign(out.rows * d, 0.0);
  detail::parallel_for(out.rows, jobs, [&](std::size_t row) {
    std::vector<long double> acc(d, 0.0L);
    if (row < ns) {
      for (std::size_t f = 0; f < nf; ++f) {
        for (std::size_t k = 0; k < d; ++k) acc[k] += grid.at(f, row, k);
      }
      for (std::size_t k = 0; k < d; ++k) out.values[row * d + k] = static_cast<double>(acc[k] / nf);
    } else {
      const std::size_t f = row - ns;
      for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t k = 0; k < d; ++k) acc[k] += grid.at(f, s, k);
      }
      for (std::size_t k = 0; k < d; ++k) out.values[row * d + k] = static_cast<double>(acc[k] / ns);
    }
  });
  return out;
}

}  // namespace spatialift
