#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tricloud/entropy.hpp"
#include "tricloud/errors.hpp"

using namespace tricloud;
using namespace tricloud::entropy;

namespace {

// Two-sided geometric integers with mostly zeros, like quantized AC coefficients.
std::vector<std::int64_t> laplacian(std::mt19937_64& rng, std::size_t n, double p_zero, double scale) {
  std::vector<std::int64_t> s(n);
  std::geometric_distribution<std::int64_t> geo(1.0 / (1.0 + scale));
  for (auto& x : s) {
    if (oracle::uniform(rng) < p_zero) continue;
    x = 1 + geo(rng);
    if (rng() & 1) x = -x;
  }
  return s;
}

double empirical_entropy_bits(const std::vector<std::int64_t>& s) {
  std::map<std::int64_t, double> freq;
  for (auto x : s) freq[x] += 1;
  double h = 0;
  for (auto [_, c] : freq) h -= c * std::log2(c / double(s.size()));
  return h;
}

}  // namespace

TEST_SUITE("entropy") {
  TEST_CASE("RLGR bytes equal the bit-string oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 400; ++trial) {
      const std::size_t n = rng() % 2000;
      std::vector<std::int64_t> s;
      switch (trial % 4) {
        case 0: s = laplacian(rng, n, 0.9, 1.0); break;
        case 1: s = laplacian(rng, n, 0.1, 50.0); break;
        case 2: s = laplacian(rng, n, 0.5, 1e6); break;
        default:
          for (std::size_t i = 0; i < n; ++i) s.push_back(std::int64_t(rng() >> 2) - (std::int64_t{1} << 61));
      }
      const auto bytes = rlgr_encode(s);
      REQUIRE(bytes == oracle::rlgr(s));
      REQUIRE(rlgr_decode(bytes, s.size()) == s);
    }
  }

  TEST_CASE("long zero runs cost almost nothing") {
    const std::vector<std::int64_t> zeros(10000, 0);
    const auto b = rlgr_encode(zeros);
    CHECK(b.size() < 100);
    CHECK(rlgr_decode(b, zeros.size()) == zeros);
    CHECK(rlgr_encode({}).empty());
    CHECK(rlgr_decode({}, 0).empty());
  }

  TEST_CASE("two-sided geometric sources code within one bit per symbol of the entropy") {
    std::mt19937_64 rng(32);
    for (double scale : {0.5, 2.0, 10.0, 100.0}) {
      // difference of two iid geometrics: P(k) proportional to theta^|k|
      std::geometric_distribution<std::int64_t> geo(1.0 / (1.0 + scale));
      std::vector<std::int64_t> s(10000);
      for (auto& x : s) x = geo(rng) - geo(rng);
      CAPTURE(scale);
      const double bits = 8.0 * rlgr_encode(s).size();
      CHECK(bits / s.size() <= empirical_entropy_bits(s) / s.size() + 1.0);
    }
  }

  TEST_CASE("extreme magnitudes use the escape codeword") {
    const std::vector<std::int64_t> s{kMaxSymbolMagnitude, -kMaxSymbolMagnitude, 0, 1, -1};
    CHECK(rlgr_decode(rlgr_encode(s), s.size()) == s);
    CHECK_THROWS_AS(rlgr_encode(std::vector<std::int64_t>{kMaxSymbolMagnitude + 1}), RangeError);
  }

  TEST_CASE("corrupt RLGR payloads") {
    const std::vector<std::int64_t> s{5, -3, 0, 0, 0, 12, 1};
    auto b = rlgr_encode(s);
    CHECK_THROWS_AS(rlgr_decode(std::span(b).first(b.size() - 1), s.size()), CorruptStreamError);
    CHECK_THROWS_AS(rlgr_decode(b, s.size() + 50), CorruptStreamError);
    auto extra = b;
    extra.push_back(0);
    CHECK_THROWS_AS(rlgr_decode(extra, s.size()), CorruptStreamError);
    // The run-mode opener for a single zero at k=1 is "1 0": a 0x00 byte is
    // a full run of two zeros, more than the one symbol asked for.
    CHECK_THROWS_AS(rlgr_decode(std::vector<std::uint8_t>{0x00}, 1), CorruptStreamError);
  }

  TEST_CASE("index runs of the worked examples") {
    CHECK(index_runs(std::vector<std::uint32_t>{0, 1, 2, 3}) == std::vector<std::uint64_t>{4, 0});
    CHECK(index_runs(std::vector<std::uint32_t>{0, 0, 1, 1, 1, 2}) == std::vector<std::uint64_t>{1, 1, 1, 2, 1, 0});
    CHECK(index_runs(std::vector<std::uint32_t>{0, 0, 0}) == std::vector<std::uint64_t>{1, 2});
    CHECK(index_runs({}).empty());
  }

  TEST_CASE("malformed index maps") {
    CHECK_THROWS_AS(index_runs(std::vector<std::uint32_t>{1, 2}), MalformedIndexMapError);
    CHECK_THROWS_AS(index_runs(std::vector<std::uint32_t>{0, 2}), MalformedIndexMapError);
    CHECK_THROWS_AS(index_runs(std::vector<std::uint32_t>{0, 1, 0}), MalformedIndexMapError);
    CHECK_THROWS_AS(index_map_from_runs(std::vector<std::uint64_t>{1}), CorruptStreamError);
    CHECK_THROWS_AS(index_map_from_runs(std::vector<std::uint64_t>{0, 3}), CorruptStreamError);
  }

  TEST_CASE("index-run coder round trip") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<std::uint32_t> map{0};
      const std::size_t n = rng() % 3000;
      const double p_dup = oracle::uniform(rng);
      for (std::size_t i = 0; i < n; ++i) map.push_back(map.back() + (oracle::uniform(rng) < p_dup ? 0 : 1));
      const auto runs = index_runs(map);
      REQUIRE(runs.size() % 2 == 0);
      REQUIRE(index_map_from_runs(runs) == map);
      REQUIRE(index_runs_decode(index_runs_encode(map)) == map);
    }
  }

  TEST_CASE("zlib framing") {
    std::vector<std::uint8_t> data(5000);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::uint8_t(i * i % 251);
    const auto z = deflate_bytes(data);
    CHECK((z[0] & 0x0f) == 8);  // CM = deflate
    CHECK(inflate_bytes(z) == data);
    CHECK(inflate_bytes(deflate_bytes({})).empty());
    CHECK_THROWS_AS(inflate_bytes(std::span(z).first(z.size() - 3)), CorruptStreamError);
    auto bad = z;
    bad[1] ^= 0xff;
    CHECK_THROWS_AS(inflate_bytes(bad), CorruptStreamError);
    auto trailing = z;
    trailing.push_back(1);
    CHECK_THROWS_AS(inflate_bytes(trailing), CorruptStreamError);
  }
}
