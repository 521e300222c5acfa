// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

// Boundary to external vision-language models.
//
// Requests go out either one message at a time over HTTP (JSON body, JSON
// reply) or as a file batch: `<name>.req.jsonl` is written into a directory,
// an external runner writes `<name>.resp.jsonl` and then a `<name>.done`
// marker. Responses are always returned in request order.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spatialift/coord_codec.hpp"
#include "spatialift/dataset_builder.hpp"

namespace spatialift {

struct ModelRequest {
  std::string request_id;
  std::string media_ref;
  std::string prompt;
};

enum class ResponseStatus { Ok, Error };

struct ModelResponse {
  std::string request_id;
  std::string text;
  ResponseStatus status = ResponseStatus::Ok;
  std::optional<std::string> error_detail;

  static ModelResponse ok(std::string id, std::string text);
  static ModelResponse error(std::string id, std::string detail);
};

// Sent with every request, applied by the remote model only.
struct SamplingConfig {
  double temperature = 0.2;
  int max_new_tokens = 256;

  void validate() const;
};

// Serialises {request_id, media_ref, prompt, sampling: {...}}.
std::string encode_wire_request(const ModelRequest& req, const SamplingConfig& cfg);

struct SendResult {
  enum class Kind { Ok, Transient, Permanent };
  Kind kind = Kind::Ok;
  std::string payload;  // text on Ok, error detail otherwise
};

// Parses {request_id, text} or {request_id, error}; anything else is a
// permanent "malformed reply".
SendResult decode_wire_reply(const std::string& body, const std::string& expected_id);

class RequestTransport {
 public:
  virtual ~RequestTransport() = default;
  virtual SendResult send(const ModelRequest& req, const SamplingConfig& cfg) = 0;
};

// POSTs each request to an http:// endpoint URL. Connection failures, 429
// and 5xx are transient; other non-200 statuses are permanent.
class HttpTransport : public RequestTransport {
 public:
  explicit HttpTransport(std::string endpoint_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));
  SendResult send(const ModelRequest& req, const SamplingConfig& cfg) override;

 private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Adapts a callable (mock model, test double) to the transport interface.
class FunctionTransport : public RequestTransport {
 public:
  using Fn = std::function<SendResult(const ModelRequest&, const SamplingConfig&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  SendResult send(const ModelRequest& req, const SamplingConfig& cfg) override { return fn_(req, cfg); }

 private:
  Fn fn_;
};

struct QueryOptions {
  int max_inflight = 4;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{5000};
  // Replaced in tests to avoid real sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Throws InvalidArgument for an empty batch or duplicate request ids; every
// other failure becomes a per-request error response.
std::vector<ModelResponse> query_batch(const std::vector<ModelRequest>& requests,
                                       const SamplingConfig& cfg, RequestTransport& transport,
                                       const QueryOptions& opts = {});

struct FileBatchOptions {
  std::filesystem::path directory;
  std::string batch_name = "batch";
  std::chrono::milliseconds poll_interval{200};
  std::chrono::milliseconds timeout{std::chrono::hours(24)};
};

std::vector<ModelResponse> query_batch_files(const std::vector<ModelRequest>& requests,
                                             const SamplingConfig& cfg,
                                             const FileBatchOptions& opts);

// ---------------------------------------------------------------------------
// Mock models

// Location ground truth: absent (NegPred), a box, a point, or text that is
// already encoded.
struct LocationTruth {
  std::string item_id;
  ImageDims dims;
  ReprScheme scheme = ReprScheme::nfp();
  LocationForm form = LocationForm::BBox;
  std::variant<std::monostate, BBox, PointLoc, LocationText> where;
};

struct VqaTruth {
  std::string item_id;
  std::string answer;
};

struct RegionTruth {
  std::string item_id;
  std::string caption;
};

using GroundTruth =
    std::variant<LocationTruth, SpatialBenchItem, HallucinationItem, VqaTruth, RegionTruth>;

std::string ground_truth_id(const GroundTruth& gt);

// Answers perfectly from ground truth in canonical phrasing. A ground truth
// for a different item yields an error response.
ModelResponse oracle_mock(const ModelRequest& req, const GroundTruth& gt);

struct AnswerSpace {
  enum class Kind { LeftRight, AboveBelow, YesNo, Location };
  Kind kind = Kind::YesNo;
  ImageDims dims{224, 224};
  ReprScheme scheme = ReprScheme::nfp();
  LocationForm form = LocationForm::BBox;
};

// Seeded uniform answer; identical (request_id, seed) give identical text.
ModelResponse random_mock(const ModelRequest& req, const AnswerSpace& space, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Video token pooling

struct TokenGrid {
  std::size_t frames = 0;    // n_f
  std::size_t spatial = 0;   // S
  std::size_t features = 0;  // d
  std::vector<double> values;  // [frame][spatial][feature], row-major

  double at(std::size_t f, std::size_t s, std::size_t k) const {
    return values[(f * spatial + s) * features + k];
  }
  void validate() const;
};

struct PooledTokens {
  std::size_t rows = 0;  // S + n_f
  std::size_t features = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t k) const { return values[r * features + k]; }
};

// Rows 0..S-1: mean over frames per spatial position. Rows S..S+n_f-1: mean
// over spatial positions per frame.
PooledTokens spatiotemporal_pool(const TokenGrid& grid, int jobs = 1);

}  // namespace spatialift
