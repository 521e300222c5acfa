// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "spatialift/errors.hpp"
#include "spatialift/model_gateway.hpp"
#include "spatialift/prompt_engine.hpp"
#include "spatialift/rng.hpp"

using namespace spatialift;
using json = nlohmann::ordered_json;
using namespace std::chrono_literals;

namespace {

std::vector<ModelRequest> make_requests(int n) {
  std::vector<ModelRequest> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"r" + std::to_string(i), "img" + std::to_string(i) + ".jpg",
                   "prompt " + std::to_string(i)});
  }
  return out;
}

QueryOptions no_sleep(std::vector<std::chrono::milliseconds>* record = nullptr) {
  QueryOptions o;
  o.sleep = [record](std::chrono::milliseconds d) {
    if (record) record->push_back(d);
  };
  return o;
}

// Runs an httplib server on a free loopback port for the lifetime of the object.
struct LocalServer {
  httplib::Server svr;
  std::thread th;
  int port = 0;

  explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> h) {
    svr.Post("/generate", std::move(h));
    port = svr.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  ~LocalServer() {
    svr.stop();
    th.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/generate"; }
};

}  // namespace

TEST_CASE("wire format") {
  const ModelRequest req{"a1", "coco/1.jpg", "Is there a cat in this image?"};
  const auto j = json::parse(encode_wire_request(req, {0.2, 64}));
  CHECK(j["request_id"] == "a1");
  CHECK(j["media_ref"] == "coco/1.jpg");
  CHECK(j["prompt"] == "Is there a cat in this image?");
  CHECK(j["sampling"]["temperature"].get<double>() == 0.2);
  CHECK(j["sampling"]["max_new_tokens"] == 64);

  using K = SendResult::Kind;
  auto r = decode_wire_reply(R"({"request_id":"a1","text":"Yes"})", "a1");
  CHECK(r.kind == K::Ok);
  CHECK(r.payload == "Yes");
  r = decode_wire_reply(R"({"request_id":"a1","error":"out of memory"})", "a1");
  CHECK(r.kind == K::Permanent);
  CHECK(r.payload == "out of memory");
  CHECK(decode_wire_reply("not json", "a1").kind == K::Permanent);
  CHECK(decode_wire_reply(R"({"request_id":"b","text":"x"})", "a1").kind == K::Permanent);
  CHECK(decode_wire_reply(R"({"request_id":"a1"})", "a1").kind == K::Permanent);
  CHECK(decode_wire_reply(R"([1,2])", "a1").kind == K::Permanent);
}

TEST_CASE("sampling config validation") {
  SamplingConfig c;
  CHECK(c.temperature == 0.2);
  CHECK_NOTHROW(c.validate());
  c.temperature = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.temperature = 0.2;
  c.max_new_tokens = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  FunctionTransport t([](const auto& r, const auto&) { return SendResult{SendResult::Kind::Ok, r.prompt}; });
  CHECK_THROWS_AS(query_batch(make_requests(1), {-1, 5}, t), InvalidArgument);
}

TEST_CASE("query_batch: success, partial failure and alignment") {
  FunctionTransport echo([](const ModelRequest& r, const SamplingConfig&) {
    if (r.request_id == "r1") return SendResult{SendResult::Kind::Permanent, "bad media"};
    return SendResult{SendResult::Kind::Ok, "ans " + r.request_id};
  });
  const auto reqs = make_requests(3);
  const auto out = query_batch(reqs, {}, echo, no_sleep());
  REQUIRE(out.size() == 3);
  CHECK(out[0].status == ResponseStatus::Ok);
  CHECK(out[0].text == "ans r0");
  CHECK(out[1].status == ResponseStatus::Error);
  CHECK(out[1].error_detail == "bad media");
  CHECK(out[2].text == "ans r2");
  for (std::size_t i = 0; i < 3; ++i) CHECK(out[i].request_id == reqs[i].request_id);

  auto dup = make_requests(3);
  dup[2].request_id = "r0";
  std::atomic<int> calls{0};
  FunctionTransport counting([&](const auto&, const auto&) {
    ++calls;
    return SendResult{SendResult::Kind::Ok, "x"};
  });
  CHECK_THROWS_AS(query_batch(dup, {}, counting), InvalidArgument);
  CHECK_THROWS_AS(query_batch({}, {}, counting), InvalidArgument);
  CHECK(calls == 0);
}

TEST_CASE("query_batch: retries with bounded exponential backoff") {
  std::mutex mu;
  std::map<std::string, int> attempts;
  FunctionTransport flaky([&](const ModelRequest& r, const SamplingConfig&) {
    std::lock_guard lock(mu);
    const int n = ++attempts[r.request_id];
    if (r.request_id == "r0" && n < 3) return SendResult{SendResult::Kind::Transient, "503"};
    if (r.request_id == "r1") return SendResult{SendResult::Kind::Transient, "down"};
    if (r.request_id == "r2") throw std::runtime_error("socket closed");
    return SendResult{SendResult::Kind::Ok, "fine"};
  });
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(&sleeps);
  opts.max_inflight = 1;
  const auto out = query_batch(make_requests(4), {}, flaky, opts);
  CHECK(out[0].status == ResponseStatus::Ok);
  CHECK(attempts["r0"] == 3);
  CHECK(out[1].status == ResponseStatus::Error);
  CHECK(*out[1].error_detail == "down");
  CHECK(attempts["r1"] == 3);
  CHECK(out[2].status == ResponseStatus::Error);
  CHECK(out[2].error_detail->find("socket closed") != std::string::npos);
  CHECK(out[3].text == "fine");
  CHECK(attempts["r3"] == 1);
  // Two sleeps per retried request: 200 ms then 400 ms.
  REQUIRE(sleeps.size() == 6);
  for (std::size_t i = 0; i < 6; i += 2) {
    CHECK(sleeps[i] == 200ms);
    CHECK(sleeps[i + 1] == 400ms);
  }

  // Backoff is capped.
  attempts.clear();
  sleeps.clear();
  opts.max_attempts = 6;
  opts.initial_backoff = 1000ms;
  opts.max_backoff = 3000ms;
  query_batch({{"r1", "m", "p"}}, {}, flaky, opts);
  CHECK(attempts["r1"] == 6);
  const std::vector<std::chrono::milliseconds> want = {1000ms, 2000ms, 3000ms, 3000ms, 3000ms};
  CHECK(sleeps == want);
}

TEST_CASE("query_batch: bounded in-flight and request order") {
  std::atomic<int> live{0}, peak{0};
  FunctionTransport slow([&](const ModelRequest& r, const SamplingConfig&) {
    const int now = ++live;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1 + (std::stoi(r.request_id.substr(1)) * 7) % 5));
    --live;
    return SendResult{SendResult::Kind::Ok, r.request_id};
  });
  QueryOptions opts = no_sleep();
  opts.max_inflight = 3;
  const auto reqs = make_requests(40);
  const auto out = query_batch(reqs, {}, slow, opts);
  CHECK(peak.load() <= 3);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(out[i].request_id == reqs[i].request_id);
    CHECK(out[i].text == reqs[i].request_id);
  }
}

TEST_CASE("HTTP transport against a local server") {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request& rq, httplib::Response& rs) {
    ++hits;
    const auto j = json::parse(rq.body);
    const std::string id = j["request_id"];
    if (id == "r1") {
      rs.status = 503;
      return;
    }
    if (id == "r2") {
      rs.set_content(json{{"request_id", id}, {"error", "cannot read media"}}.dump(), "application/json");
      return;
    }
    if (id == "r3") {
      rs.set_content("<html>oops</html>", "text/html");
      return;
    }
    if (id == "r4") {
      rs.status = 404;
      return;
    }
    CHECK(j["sampling"]["temperature"].get<double>() == 0.2);
    rs.set_content(json{{"request_id", id}, {"text", "echo: " + j["prompt"].get<std::string>()}}.dump(),
                   "application/json");
  });
  HttpTransport http(server.url(), 5s);
  const auto out = query_batch(make_requests(6), {}, http, no_sleep());
  CHECK(out[0].text == "echo: prompt 0");
  CHECK(out[1].status == ResponseStatus::Error);
  CHECK(out[1].error_detail == "server status 503");
  CHECK(out[2].error_detail == "cannot read media");
  CHECK(out[3].error_detail->starts_with("malformed reply"));
  CHECK(out[4].error_detail == "server status 404");
  CHECK(out[5].text == "echo: prompt 5");
  // 503 is retried up to three attempts; everything else is sent once.
  CHECK(hits == 8);

  HttpTransport dead("http://127.0.0.1:1/generate", 1s);
  const auto d = query_batch(make_requests(1), {}, dead, no_sleep());
  CHECK(d[0].status == ResponseStatus::Error);
  CHECK(d[0].error_detail->starts_with("transport error"));

  CHECK_THROWS_AS(HttpTransport("https://example.invalid/x"), ConfigError);
}

TEST_CASE("file batch transport") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "spatialift_batch_test";
  fs::remove_all(dir);
  const auto reqs = make_requests(4);

  // External runner: wait for the request file, answer all but r2, drop a marker.
  std::thread runner([&] {
    const auto req = dir / "b1.req.jsonl";
    while (!fs::exists(req)) std::this_thread::sleep_for(5ms);
    std::ifstream in(req);
    std::ofstream out(dir / "b1.resp.jsonl");
    std::string line;
    std::vector<json> rows;
    while (std::getline(in, line)) rows.push_back(json::parse(line));
    std::reverse(rows.begin(), rows.end());
    for (const auto& j : rows) {
      const std::string id = j["request_id"];
      if (id == "r2") continue;
      if (id == "r3") out << json{{"request_id", id}, {"error", "decode failed"}}.dump() << "\n";
      else out << json{{"request_id", id}, {"text", "seen " + j["media_ref"].get<std::string>()}}.dump() << "\n";
    }
    out << "garbage line\n";
    out.close();
    std::ofstream(dir / "b1.done") << "";
  });
  const auto out = query_batch_files(reqs, {}, {dir, "b1", 5ms, 30s});
  runner.join();
  REQUIRE(out.size() == 4);
  CHECK(out[0].text == "seen img0.jpg");
  CHECK(out[1].text == "seen img1.jpg");
  CHECK(out[2].error_detail == "no reply in response file");
  CHECK(out[3].error_detail == "decode failed");

  const auto timed = query_batch_files(reqs, {}, {dir, "never", 5ms, 30ms});
  for (const auto& r : timed) CHECK(r.error_detail == "file batch timed out");
  fs::remove_all(dir);
}

TEST_CASE("oracle mock") {
  SpatialBenchItem s;
  s.item_id = "s1";
  s.query.name = "dog";
  s.ref.name = "table";
  s.gt_keyword = Side::Left;
  const auto r = oracle_mock({"s1", "", ""}, s);
  CHECK(r.text == "The dog is located to the left of table.");
  CHECK(contains_word(r.text, "left"));
  CHECK_FALSE(contains_word(r.text, "right"));

  HallucinationItem h;
  h.item_id = "h1";
  h.gt = Polarity::No;
  CHECK(oracle_mock({"h1", "", ""}, h).text == "No");
  h.gt = Polarity::Yes;
  CHECK(oracle_mock({"h1", "", ""}, h).text == "Yes");
  CHECK(oracle_mock({"other", "", ""}, h).status == ResponseStatus::Error);

  CHECK(oracle_mock({"v", "", ""}, VqaTruth{"v", "two"}).text == "two");
  CHECK(oracle_mock({"c", "", ""}, RegionTruth{"c", "a red bus"}).text == "a red bus");

  LocationTruth neg{"n", {100, 100}, ReprScheme::nfp(), LocationForm::BBox, std::monostate{}};
  const auto nr = oracle_mock({"n", "", ""}, neg);
  CHECK(parse_response(nr.text, Objective::NegPred, neg.scheme, neg.form).kind == ResponseKind::Negative);

  // Location answers decode back within the codec error bound.
  SplitMix64 rng(13);
  for (const auto& sch : {ReprScheme::nfp(4), ReprScheme::ivb(224), ReprScheme::diga()}) {
    for (int i = 0; i < 300; ++i) {
      const ImageDims dims{static_cast<int>(50 + rng.below(1000)), static_cast<int>(50 + rng.below(1000))};
      const double x1 = rng.uniform() * (dims.width - 2), y1 = rng.uniform() * (dims.height - 2);
      const BBox b{x1, y1, x1 + 1 + rng.uniform() * (dims.width - x1 - 1),
                   y1 + 1 + rng.uniform() * (dims.height - y1 - 1)};
      LocationTruth gt{"L", dims, sch, LocationForm::BBox, b};
      const auto resp = oracle_mock({"L", "", ""}, gt);
      REQUIRE(resp.status == ResponseStatus::Ok);
      const auto p = parse_response(resp.text, Objective::LocPred, sch, LocationForm::BBox);
      REQUIRE(p.kind == ResponseKind::Location);
      const auto d = decode_bbox(*p.location, dims);
      const double ex = quantization_error_bound(sch, dims.width) + 1e-9;
      const double ey = quantization_error_bound(sch, dims.height) + 1e-9;
      CHECK(std::abs(d.x1 - b.x1) <= ex);
      CHECK(std::abs(d.x2 - b.x2) <= ex);
      CHECK(std::abs(d.y1 - b.y1) <= ey);
      CHECK(std::abs(d.y2 - b.y2) <= ey);
    }
  }
}

TEST_CASE("random mock") {
  int left = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto r = random_mock({"q" + std::to_string(i), "", ""}, {AnswerSpace::Kind::LeftRight}, 7);
    CHECK((r.text == "left" || r.text == "right"));
    left += r.text == "left";
  }
  CHECK(std::abs(left / 10000.0 - 0.5) <= 0.02);

  for (int i = 0; i < 200; ++i) {
    const ModelRequest q{"y" + std::to_string(i), "", ""};
    const auto a = random_mock(q, {AnswerSpace::Kind::YesNo}, 3);
    CHECK((a.text == "Yes" || a.text == "No"));
    CHECK(random_mock(q, {AnswerSpace::Kind::YesNo}, 3).text == a.text);
    const auto ab = random_mock(q, {AnswerSpace::Kind::AboveBelow}, 3).text;
    CHECK((ab == "above" || ab == "below"));
  }

  AnswerSpace loc{AnswerSpace::Kind::Location, {640, 480}, ReprScheme::ivb(), LocationForm::BBox};
  for (int i = 0; i < 200; ++i) {
    const auto r = random_mock({"b" + std::to_string(i), "", ""}, loc, 1);
    const auto p = parse_response(r.text, Objective::LocPred, loc.scheme, loc.form);
    CHECK(p.kind == ResponseKind::Location);
  }
}

TEST_CASE("spatiotemporal pooling") {
  TokenGrid g{3, 5, 2, std::vector<double>(30, 1.25)};
  auto p = spatiotemporal_pool(g);
  CHECK(p.rows == 8);
  for (double v : p.values) CHECK(v == 1.25);

  SplitMix64 rng(2);
  TokenGrid r{8, 256, 4, {}};
  for (std::size_t i = 0; i < 8 * 256 * 4; ++i) r.values.push_back(rng.uniform() * 2 - 1);
  p = spatiotemporal_pool(r, 4);
  REQUIRE(p.rows == 264);
  REQUIRE(p.features == 4);
  for (std::size_t s = 0; s < 256; ++s) {
    for (std::size_t k = 0; k < 4; ++k) {
      double sum = 0;
      for (std::size_t f = 0; f < 8; ++f) sum += r.at(f, s, k);
      CHECK(p.at(s, k) == doctest::Approx(sum / 8).epsilon(1e-12));
    }
  }
  for (std::size_t f = 0; f < 8; ++f) {
    for (std::size_t k = 0; k < 4; ++k) {
      double sum = 0;
      for (std::size_t s = 0; s < 256; ++s) sum += r.at(f, s, k);
      CHECK(p.at(256 + f, k) == doctest::Approx(sum / 256).epsilon(1e-12));
    }
  }
  // Grand means of both blocks equal the grid's grand mean.
  for (std::size_t k = 0; k < 4; ++k) {
    long double all = 0, sp = 0, tp = 0;
    for (std::size_t f = 0; f < 8; ++f) {
      for (std::size_t s = 0; s < 256; ++s) all += r.at(f, s, k);
    }
    for (std::size_t s = 0; s < 256; ++s) sp += p.at(s, k);
    for (std::size_t f = 0; f < 8; ++f) tp += p.at(256 + f, k);
    const double m = static_cast<double>(all / 2048);
    CHECK(static_cast<double>(sp / 256) == doctest::Approx(m).epsilon(1e-9));
    CHECK(static_cast<double>(tp / 8) == doctest::Approx(m).epsilon(1e-9));
  }
  CHECK(spatiotemporal_pool(r, 1).values == p.values);

  TokenGrid one{1, 3, 1, {1, 2, 6}};
  p = spatiotemporal_pool(one);
  CHECK(p.at(0, 0) == 1);
  CHECK(p.at(2, 0) == 6);
  CHECK(p.at(3, 0) == 3);

  CHECK_THROWS_AS(spatiotemporal_pool(TokenGrid{0, 1, 1, {}}), InvalidArgument);
  CHECK_THROWS_AS(spatiotemporal_pool(TokenGrid{1, 1, 2, {1}}), InvalidArgument);
  CHECK_THROWS_AS(spatiotemporal_pool(TokenGrid{1, 1, 1, {std::nan("")}}), InvalidArgument);
}
