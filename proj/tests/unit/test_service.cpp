#include <gtest/gtest.h>

#include <httplib.h>

#include <chrono>
#include <set>
#include <thread>

#include "stentsim/bundle.hpp"
#include "stentsim/error.hpp"
#include "stentsim/service.hpp"
#include "support.hpp"

using namespace stentsim;
using namespace std::chrono_literals;
using testing_support::run_cli;
using testing_support::scratch_dir;
using testing_support::spit;

namespace {

const char* kTubeRequest = R"({"spec":{"kind":"straight_tube","lumen_radius_mm":5,"length_mm":24}})";

Json parse(const HttpResponse& r) { return Json::parse(r.body); }

long long make_volume(Service& s, const std::string& request = kTubeRequest) {
  const auto r = s.handle("POST", "/api/phantom", request);
  EXPECT_EQ(r.status, 200) << r.body;
  return parse(r).at("volume_id").get<long long>();
}

Json tube_run_request(long long volume_id, const Json& seeds) {
  return Json{{"volume_id", volume_id}, {"seeds", seeds}, {"stent", {{"kind", "I"}, {"diameter_mm", 12}}}};
}

Json finished(Service& s, long long run_id) {
  EXPECT_TRUE(s.wait_for_run(run_id, 120s));
  const auto r = s.handle("GET", "/api/run/" + std::to_string(run_id), "");
  EXPECT_EQ(r.status, 200);
  return parse(r);
}

}  // namespace

TEST(Service, PhantomRegistersDistinctVolumes) {
  Service s;
  const auto r = s.handle("POST", "/api/phantom", kTubeRequest);
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = parse(r);
  EXPECT_EQ(j.at("dims").size(), 3u);
  ASSERT_EQ(j.at("seeds").size(), 1u);
  EXPECT_EQ(j.at("seeds")[0].at("label"), "main");
  EXPECT_NE(make_volume(s), j.at("volume_id").get<long long>());
}

TEST(Service, PhantomRejectsBadSpecs) {
  Service s;
  const char* bad[] = {
      R"({"spec":{"kind":"fusiform_aneurysm","lumen_radius_mm":9,"bulge_radius_mm":8,"bulge_extent_mm":20}})",
      R"({"spec":{"kind":"torus"}})",
      R"({"dims":[10,10,10]})",
      R"({"spec":{"kind":"straight_tube"},"dims":[4,4,4]})",
      "not json",
  };
  for (const char* body : bad) {
    const auto r = s.handle("POST", "/api/phantom", body);
    EXPECT_EQ(r.status, 400) << body;
    EXPECT_TRUE(parse(r).contains("error"));
  }
}

TEST(Service, SimulateValidatesRequests) {
  Service s;
  const long long vol = make_volume(s);
  const Json seed = Json::parse(R"({"start_mm":[0,0,0],"end_mm":[0,0,9]})");

  EXPECT_EQ(s.handle("POST", "/api/simulate", tube_run_request(vol + 100, Json::array({seed})).dump()).status, 404);
  Json no_id = tube_run_request(vol, Json::array({seed}));
  no_id.erase("volume_id");
  EXPECT_EQ(s.handle("POST", "/api/simulate", no_id.dump()).status, 400);

  Json y = tube_run_request(vol, Json::array({seed}));
  y["stent"] = {{"kind", "Y"}, {"trunk_diameter_mm", 18}, {"limb_diameter_mm", 11}};
  const auto r = s.handle("POST", "/api/simulate", y.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_NE(r.body.find("seed"), std::string::npos) << r.body;

  EXPECT_EQ(s.handle("GET", "/api/run/999", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/api/run/abc", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/api/simulate", "").status, 405);
  EXPECT_EQ(s.handle("GET", "/api/nothing", "").status, 404);
}

TEST(Service, DoneRunCarriesTheBundle) {
  Service s;
  const auto phantom = parse(s.handle("POST", "/api/phantom", kTubeRequest));
  const auto r = s.handle("POST", "/api/simulate",
                          tube_run_request(phantom.at("volume_id"), phantom.at("seeds")).dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const long long id = parse(r).at("run_id");
  const auto done = finished(s, id);
  ASSERT_EQ(done.at("status"), "done") << done.dump();
  const auto& bundle = done.at("bundle");
  const auto& report = bundle.at("report");
  EXPECT_TRUE(report.at("verdict") == "adequate" || report.at("verdict") == "inadequate");
  const int rings = bundle.at("limbs")[0].at("mesh").at("rings");
  EXPECT_EQ(report.at("limbs")[0].at("per_ring_pct").size(), static_cast<std::size_t>(rings));

  const auto again = s.handle("GET", "/api/run/" + std::to_string(id), "");
  EXPECT_EQ(again.body, s.handle("GET", "/api/run/" + std::to_string(id), "").body);
  EXPECT_EQ(Json::parse(again.body), done);
}

TEST(Service, FailedRunReportsItsStage) {
  Service s;
  const long long vol = make_volume(s);
  const Json outside = Json::parse(R"([{"start_mm":[0,0,0],"end_mm":[0,0,1]}])");
  const auto r = s.handle("POST", "/api/simulate", tube_run_request(vol, outside).dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto failed = finished(s, parse(r).at("run_id"));
  EXPECT_EQ(failed.at("status"), "failed");
  EXPECT_EQ(failed.at("stage"), "centerline");
  EXPECT_FALSE(failed.at("error").get<std::string>().empty());
}

TEST(Service, RunningRunReportsProgress) {
  Service s;
  const auto phantom = parse(s.handle(
      "POST", "/api/phantom",
      R"({"spec":{"kind":"fusiform_aneurysm","lumen_radius_mm":9,"length_mm":100,"bulge_radius_mm":20,"bulge_extent_mm":40}})"));
  Json req = tube_run_request(phantom.at("volume_id"), phantom.at("seeds"));
  req["stent"]["diameter_mm"] = 19;
  req["forces"] = {{"eps_conv_mm", 1e-12}, {"max_iters", 4000}};  // never converges early
  const long long id = parse(s.handle("POST", "/api/simulate", req.dump())).at("run_id");

  bool saw_running = false;
  std::set<std::string> statuses;
  for (int k = 0; k < 20000 && !saw_running; ++k) {
    const auto j = Json::parse(s.handle("GET", "/api/run/" + std::to_string(id), "").body);
    statuses.insert(j.at("status"));
    if (j.at("status") == "running" && j.at("progress").at("iterations").get<int>() > 0) {
      EXPECT_EQ(j.at("progress").at("max_iters"), 4000);
      saw_running = true;
    }
    std::this_thread::sleep_for(1ms);
  }
  EXPECT_TRUE(saw_running);
  const auto done = finished(s, id);
  EXPECT_EQ(done.at("status"), "done");
  EXPECT_EQ(done.at("progress").at("iterations"), 4000);
}

TEST(Service, BundleMatchesTheCli) {
  const auto dir = scratch_dir("service_vs_cli");
  spit(dir / "spec.json", R"({"kind":"straight_tube","lumen_radius_mm":5,"length_mm":24})");
  const auto made = run_cli("phantom --spec " + (dir / "spec.json").string() + " --out " +
                            (dir / "vol.svol").string());
  ASSERT_EQ(made.exit_code, 0) << made.out;
  const auto seeds = Json::parse(made.out).at("seeds");
  const Json run = {{"seeds", seeds}, {"stent", {{"kind", "I"}, {"diameter_mm", 12}}}};
  spit(dir / "run.json", run.dump());
  const auto sim = run_cli("simulate --volume " + (dir / "vol.svol").string() + " --config " +
                           (dir / "run.json").string() + " --out " + (dir / "out").string());
  ASSERT_EQ(sim.exit_code, 0) << sim.out;

  Service s;
  const long long vol = make_volume(s);
  Json req = run;
  req["volume_id"] = vol;
  const auto done = finished(s, parse(s.handle("POST", "/api/simulate", req.dump())).at("run_id"));
  ASSERT_EQ(done.at("status"), "done");
  EXPECT_EQ(dump_canonical(done.at("bundle")), dump_canonical(bundle_to_json(read_bundle(dir / "out"))));
}

TEST(Service, ServesHttpWithCors) {
  Service s;
  const int port = s.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([&] { s.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto phantom = client.Post("/api/phantom", kTubeRequest, "application/json");
  ASSERT_TRUE(phantom);
  EXPECT_EQ(phantom->status, 200);
  EXPECT_EQ(phantom->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(phantom->get_header_value("Content-Type"), "application/json");

  auto preflight = client.Options("/api/simulate");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  auto missing = client.Get("/api/run/12345");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  // A second service cannot take the same port.
  Service other;
  EXPECT_THROW(other.bind("127.0.0.1", port), stentsim::Error);

  s.stop();
  server.join();
}
