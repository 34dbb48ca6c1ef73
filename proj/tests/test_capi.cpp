// Exercises the shared-library surface the way an external consumer would:
// only mcroi.h, opaque handles and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mcroi.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& tag) {
    dir = fs::temp_directory_path() / ("mcroi_capi_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

void write_toy_trace(const std::string& path, int width_c1 = 384) {
  std::ofstream out(path);
  out << R"({"frame_rate":10.0,"cameras":[{"camera_id":1,"width_px":)" << width_c1
      << R"(,"height_px":256,"tile_size_px":64},{"camera_id":2,"width_px":384,"height_px":256,"tile_size_px":64}]})"
      << "\n";
  auto rec = [&](int cam, int id, double l, double t, double w, double h) {
    out << R"({"camera":)" << cam << R"(,"frame":0,"bbox":[)" << l << ',' << t << ',' << w
        << ',' << h << R"(],"reid":)" << id << R"(,"gt":)" << id << "}\n";
  };
  rec(1, 1, 140, 80, 100, 100);
  rec(1, 2, 140, 16, 100, 100);
  rec(1, 3, 204, 16, 100, 100);
  rec(1, 4, 270, 70, 50, 50);
  rec(2, 1, 10, 80, 100, 100);
  rec(2, 5, 70, 30, 50, 80);
  rec(2, 6, 140, 16, 40, 40);
  rec(2, 7, 150, 30, 40, 80);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kToyConfig = R"({"filter":{"gamma":500.0},"replay_window":"profile"})";

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(mcroi_version() != nullptr);
  CHECK(mcroi_last_error() != nullptr);
}

TEST_CASE("trace handle lifecycle") {
  TempDir tmp("trace");
  write_toy_trace(tmp / "toy.jsonl");

  mcroi_trace* trace = nullptr;
  REQUIRE(mcroi_trace_load((tmp / "toy.jsonl").c_str(), &trace) == MCROI_OK);
  REQUIRE(trace != nullptr);
  CHECK(mcroi_trace_record_count(trace) == 8);
  CHECK(mcroi_trace_camera_count(trace) == 2);
  CHECK(mcroi_trace_frame_rate(trace) == 10.0);
  mcroi_trace_free(trace);

  mcroi_trace* missing = nullptr;
  CHECK(mcroi_trace_load((tmp / "nope.jsonl").c_str(), &missing) == MCROI_ERR_INPUT);
  CHECK(missing == nullptr);
  CHECK(std::strlen(mcroi_last_error()) > 0);

  CHECK(mcroi_trace_load(nullptr, &missing) == MCROI_ERR_INPUT);
}

TEST_CASE("offline and online through the C surface") {
  TempDir tmp("pipeline");
  write_toy_trace(tmp / "toy.jsonl");

  char* stats = nullptr;
  REQUIRE(mcroi_offline((tmp / "toy.jsonl").c_str(), kToyConfig,
                        (tmp / "masks.json").c_str(), (tmp / "groups.json").c_str(),
                        (tmp / "filter.json").c_str(), (tmp / "solution.json").c_str(),
                        &stats) == MCROI_OK);
  REQUIRE(stats != nullptr);
  CHECK(std::string(stats).find("\"objective\": 12") != std::string::npos);
  mcroi_string_free(stats);

  std::string masks = slurp(tmp / "masks.json");
  CHECK(masks.find("\"tiles\"") != std::string::npos);

  char* summary = nullptr;
  REQUIRE(mcroi_online((tmp / "toy.jsonl").c_str(), (tmp / "masks.json").c_str(),
                       (tmp / "groups.json").c_str(), kToyConfig,
                       (tmp / "report.json").c_str(), &summary) == MCROI_OK);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("\"accuracy\":1.0") != std::string::npos);
  mcroi_string_free(summary);
}

TEST_CASE("consistency failures map to their own status") {
  TempDir tmp("mismatch");
  write_toy_trace(tmp / "toy.jsonl");
  REQUIRE(mcroi_offline((tmp / "toy.jsonl").c_str(), kToyConfig,
                        (tmp / "masks.json").c_str(), (tmp / "groups.json").c_str(),
                        (tmp / "filter.json").c_str(), (tmp / "solution.json").c_str(),
                        nullptr) == MCROI_OK);

  write_toy_trace(tmp / "other.jsonl", /*width_c1=*/448);
  CHECK(mcroi_online((tmp / "other.jsonl").c_str(), (tmp / "masks.json").c_str(),
                     (tmp / "groups.json").c_str(), kToyConfig,
                     (tmp / "report.json").c_str(), nullptr) == MCROI_ERR_CONSISTENCY);
}

TEST_CASE("sweep through the C surface") {
  TempDir tmp("sweep");
  write_toy_trace(tmp / "toy.jsonl");
  double values[] = {1.0, 2.0};
  REQUIRE(mcroi_sweep((tmp / "toy.jsonl").c_str(), kToyConfig, "segment-len", values, 2,
                      (tmp / "sweep.csv").c_str()) == MCROI_OK);
  std::string csv = slurp(tmp / "sweep.csv");
  CHECK(csv.find("param,value,total_tiles,accuracy,bandwidth_bps,latency_s") == 0);
  CHECK(csv.find("segment-len,1,") != std::string::npos);

  CHECK(mcroi_sweep((tmp / "toy.jsonl").c_str(), kToyConfig, "nonsense", values, 2,
                    (tmp / "sweep.csv").c_str()) == MCROI_ERR_INPUT);

  // malformed config is an input error
  CHECK(mcroi_sweep((tmp / "toy.jsonl").c_str(), "{nope", "gamma", values, 2,
                    (tmp / "sweep.csv").c_str()) == MCROI_ERR_INPUT);
}
