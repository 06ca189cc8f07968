#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "report.hpp"
#include "tricloud/codec.hpp"
#include "tricloud/io.hpp"
#include "tricloud/metrics.hpp"

using namespace tricloud;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tricloud");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tricloud_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::vector<std::string> small_generate(const std::string& out, const std::string& amplitude = "0.03") {
  return {"generate", "--shape", "sphere", "--frames", "4", "--faces", "80", "--upsample", "3", "--depth", "8",
          "--amplitude", amplitude, "-o", out};
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
  return f;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate is deterministic") {
    TempDir d;
    REQUIRE(run(small_generate(d / "a.tcg")).code == 0);
    REQUIRE(run(small_generate(d / "b.tcg")).code == 0);
    CHECK(io::read_file(d / "a.tcg") == io::read_file(d / "b.tcg"));
    CHECK(io::read_sequence(d / "a.tcg").frame_count() == 4);
  }

  TEST_CASE("usage errors exit with 2") {
    TempDir d;
    CHECK(run({}).code == 2);
    CHECK(run({"generate", "--shape", "sphere"}).code == 2);
    CHECK(run({"generate", "--shape", "cube", "-o", d / "x.tcg"}).code == 2);
    CHECK(run({"encode", "-i", d / "missing.tcg"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("encode, decode and eval round trip") {
    TempDir d;
    REQUIRE(run(small_generate(d / "s.tcg")).code == 0);
    const auto enc = run({"encode", "-i", d / "s.tcg", "-o", d / "s.tcb", "--step-motion", "2", "--step-color-intra",
                          "4", "--step-color-inter", "4", "--report", d / "r.csv", "--json", d / "r.json", "--plot",
                          d / "r.svg"});
    REQUIRE(enc.code == 0);
    CHECK(enc.out.find("gof frame type geometry_kbit color_kbit") != std::string::npos);
    CHECK(fs::exists(d / "r.svg"));
    CHECK(fs::file_size(d / "s.tcb") > 0);
    const auto report = io::read_file(d / "r.csv");
    const std::string header(report.begin(), std::find(report.begin(), report.end(), '\n'));
    CHECK(csv_fields(header) == cli::encode_frame_columns());
    REQUIRE(run({"decode", "-i", d / "s.tcb", "-o", d / "r.tcg"}).code == 0);

    const auto ev = run({"eval", "--original", d / "s.tcg", "--reconstruction", d / "r.tcg", "--bitstream", d / "s.tcb",
                         "--uinterp", "2", "--json", d / "e.json", "--csv", d / "e.csv"});
    REQUIRE(ev.code == 0);
    std::istringstream lines(ev.out);
    std::string head, row;
    std::getline(lines, head);
    std::getline(lines, row);
    const auto cols = csv_fields(head);
    CHECK(cols == cli::eval_columns());
    const auto vals = csv_fields(row);
    REQUIRE(vals.size() == cols.size());
    for (const auto& v : vals) CHECK(!v.empty());

    // The reported triangle-cloud PSNR is the library value, printed with six decimals.
    const auto orig = io::read_sequence(d / "s.tcg"), rec = io::read_sequence(d / "r.tcg");
    std::vector<TriangleCloudFrame> a, b;
    for (const auto& g : orig.gofs) a.insert(a.end(), g.frames.begin(), g.frames.end());
    for (const auto& g : rec.gofs) b.insert(b.end(), g.frames.begin(), g.frames.end());
    const auto tri = metrics::psnr_triangle_cloud(a, b, 2);
    const auto at = [&](const std::string& name) {
      return vals[std::find(cols.begin(), cols.end(), name) - cols.begin()];
    };
    CHECK(at("tri_psnr_y") == cli::format_number(tri.color[0]));
    CHECK(at("tri_psnr_g") == cli::format_number(tri.geometry));
    const auto bits = 8 * io::read_file(d / "s.tcb").size();
    CHECK(at("bits") == std::to_string(bits));
    CHECK(at("mbps") == cli::format_number(metrics::rate_mbps(bits, 4)));
  }

  TEST_CASE("identical inputs render infinite PSNR as inf") {
    TempDir d;
    REQUIRE(run(small_generate(d / "s.tcg")).code == 0);
    const auto ev = run({"eval", "--original", d / "s.tcg", "--reconstruction", d / "s.tcg", "--metrics",
                         "triangle,projection,matching", "--uinterp", "1"});
    REQUIRE(ev.code == 0);
    std::istringstream lines(ev.out);
    std::string head, row;
    std::getline(lines, head);
    std::getline(lines, row);
    const auto cols = csv_fields(head), vals = csv_fields(row);
    for (const auto& name : {"tri_psnr_g", "tri_psnr_y", "proj_psnr_y", "match_psnr_g", "match_psnr_y"})
      CHECK(vals[std::find(cols.begin(), cols.end(), name) - cols.begin()] == "inf");
    CHECK(run({"eval", "--original", d / "s.tcg", "--reconstruction", d / "s.tcg", "--metrics", "transform"}).code == 2);
    CHECK(run({"eval", "--original", d / "s.tcg", "--reconstruction", d / "s.tcg", "--metrics", "bogus"}).code == 2);
  }

  TEST_CASE("static hybrid stream is smaller than intra-only") {
    TempDir d;
    REQUIRE(run(small_generate(d / "s.tcg", "0")).code == 0);
    REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "h.tcb"}).code == 0);
    REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "i.tcb", "--intra-only"}).code == 0);
    CHECK(fs::file_size(d / "h.tcb") < fs::file_size(d / "i.tcb"));
  }

  TEST_CASE("step ladder gives monotone sizes") {
    TempDir d;
    REQUIRE(run(small_generate(d / "s.tcg")).code == 0);
    std::uintmax_t prev = ~std::uintmax_t{0};
    for (const char* step : {"1", "2", "4", "8", "16", "32", "64"}) {
      REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "x.tcb", "--step-motion", step, "--step-color-intra", step,
                   "--step-color-inter", step})
                  .code == 0);
      const auto size = fs::file_size(d / "x.tcb");
      CHECK(size <= prev);
      prev = size;
    }
  }

  TEST_CASE("bad magic, truncation and version mismatch") {
    TempDir d;
    REQUIRE(run(small_generate(d / "s.tcg")).code == 0);
    REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "s.tcb"}).code == 0);
    // A sequence file is not a bitstream.
    CHECK(run({"decode", "-i", d / "s.tcg", "-o", d / "r.tcg"}).code == 2);
    CHECK(run({"encode", "-i", d / "s.tcb", "-o", d / "x.tcb"}).code == 2);
    auto bytes = io::read_file(d / "s.tcb");
    io::write_file(d / "t.tcb", std::span(bytes).first(bytes.size() - 10));
    CHECK(run({"decode", "-i", d / "t.tcb", "-o", d / "r.tcg"}).code == 1);
    bytes[4] = 9;
    io::write_file(d / "v.tcb", bytes);
    const auto r = run({"decode", "-i", d / "v.tcb", "-o", d / "r.tcg"});
    CHECK(r.code == 1);
    CHECK(r.err.find("version") != std::string::npos);
    CHECK(run({"decode", "-i", d / "nope.tcb", "-o", d / "r.tcg"}).code == 1);
  }

  TEST_CASE("parallel encode writes the same bytes") {
    TempDir d;
    auto gen = small_generate(d / "s.tcg");
    gen.insert(gen.end(), {"--gof-size", "2"});
    REQUIRE(run(gen).code == 0);
    REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "a.tcb", "--jobs", "1"}).code == 0);
    REQUIRE(run({"encode", "-q", "-i", d / "s.tcg", "-o", d / "b.tcb", "--jobs", "3"}).code == 0);
    CHECK(io::read_file(d / "a.tcb") == io::read_file(d / "b.tcb"));
    REQUIRE(run({"decode", "-i", d / "a.tcb", "-o", d / "r.tcg", "--jobs", "2"}).code == 0);
    CHECK(io::read_sequence(d / "r.tcg").gofs.size() == 2);
  }

  TEST_CASE("number formatting") {
    CHECK(cli::format_number(metrics::kInfinity) == "inf");
    CHECK(cli::format_number(1.5) == "1.500000");
  }
}
