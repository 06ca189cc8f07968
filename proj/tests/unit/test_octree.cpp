#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tricloud/errors.hpp"
#include "tricloud/octree.hpp"

using namespace tricloud;

namespace {

// Depth-first walk over a std::set of codes.
void oracle_tree(const std::set<std::uint64_t>& codes, std::uint64_t prefix, std::uint32_t level, std::uint32_t depth,
                 std::vector<std::uint8_t>& out) {
  const std::uint32_t below = 3 * (depth - level - 1);
  std::uint8_t byte = 0;
  std::vector<std::uint64_t> kids;
  for (std::uint64_t child = 0; child < 8; ++child) {
    const std::uint64_t lo = ((prefix << 3) | child) << below;
    const std::uint64_t hi = lo + (std::uint64_t{1} << below);
    auto it = codes.lower_bound(lo);
    if (it != codes.end() && *it < hi) {
      byte |= std::uint8_t(0x80 >> child);
      kids.push_back((prefix << 3) | child);
    }
  }
  out.push_back(byte);
  if (level + 1 < depth)
    for (auto k : kids) oracle_tree(codes, k, level + 1, depth, out);
}

VoxelSet make(std::uint32_t depth, std::vector<MortonCode> codes) {
  VoxelSet v;
  v.depth = depth;
  v.codes = std::move(codes);
  return v;
}

}  // namespace

TEST_SUITE("octree") {
  TEST_CASE("worked examples") {
    CHECK(octree::serialize(make(2, {0})) == std::vector<std::uint8_t>{0x80, 0x80});
    CHECK(octree::serialize(make(1, {0, 1, 2, 3, 4, 5, 6, 7})) == std::vector<std::uint8_t>{0xFF});
    CHECK(octree::serialize(make(1, {7})) == std::vector<std::uint8_t>{0x01});
    for (std::uint32_t j = 1; j <= 21; ++j) CHECK(octree::serialize(make(j, {123 % (1ull << (3 * j))})).size() == j);
  }

  TEST_CASE("empty or unsorted sets are rejected") {
    CHECK_THROWS_AS(octree::serialize(make(3, {})), EmptySetError);
    CHECK_THROWS_AS(octree::serialize(make(3, {5, 4})), ParameterError);
    CHECK_THROWS_AS(octree::serialize(make(3, {512})), RangeError);
  }

  TEST_CASE("serialization equals the set-based oracle and parses back") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const std::uint32_t depth = 1 + rng() % 7;
      auto v = oracle::random_voxels(rng, 1 + rng() % 400, depth, false);
      std::vector<std::uint8_t> want;
      oracle_tree(std::set<std::uint64_t>(v.codes.begin(), v.codes.end()), 0, 0, depth, want);
      const auto bytes = octree::serialize(v);
      REQUIRE(bytes == want);
      CHECK(octree::internal_node_count(v.codes, depth) == bytes.size());
      REQUIRE(octree::parse(bytes, depth) == v);
    }
  }

  TEST_CASE("malformed streams") {
    const auto bytes = octree::serialize(make(3, {1, 100, 300}));
    std::vector<std::uint8_t> shorter(bytes.begin(), bytes.end() - 1);
    CHECK_THROWS_AS(octree::parse(shorter, 3), TruncatedStreamError);
    auto longer = bytes;
    longer.push_back(0x80);
    CHECK_THROWS_AS(octree::parse(longer, 3), TrailingBytesError);
    auto zero = bytes;
    zero[1] = 0;
    CHECK_THROWS_AS(octree::parse(zero, 3), CorruptStreamError);
    CHECK_THROWS_AS(octree::parse({}, 3), TruncatedStreamError);
  }

  TEST_CASE("baseline coder round trip stays inside the quantization bound") {
    std::mt19937_64 rng(12);
    auto v = oracle::random_voxels(rng, 300, 5, true);
    const double step = 4.0;
    const auto s = octree::baseline_encode(v, step);
    const auto back = octree::baseline_decode(s, 5, step);
    CHECK(back.codes == v.codes);
    double err = 0;
    for (std::size_t i = 0; i < v.attributes.data().size(); ++i) err += std::pow(v.attributes.data()[i] - back.attributes.data()[i], 2);
    CHECK(err <= double(v.size()) * 3 * (step / 2) * (step / 2) + 1e-9);
    CHECK_THROWS_AS(octree::baseline_encode(make(5, {1, 2}), step), ShapeMismatchError);
  }
}
