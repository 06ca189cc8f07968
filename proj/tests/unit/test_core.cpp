#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tricloud/errors.hpp"
#include "tricloud/types.hpp"

using namespace tricloud;

namespace {

TriangleCloudFrame one_face(std::uint32_t upsample, std::size_t colors) {
  TriangleCloudFrame f;
  f.upsample = upsample;
  f.vertices = {{0.1, 0.1, 0.1}, {0.5, 0.1, 0.1}, {0.1, 0.5, 0.1}};
  f.faces = {{0, 1, 2}};
  f.colors.assign(colors, Vec3{100, 120, 140});
  return f;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("two identical valid frames are accepted unchanged") {
    GroupOfFrames g;
    g.frames = {one_face(2, 6), one_face(2, 6)};
    CHECK(&validate_gof(g) == &g);
  }

  TEST_CASE("extra face in frame 2 is a face mismatch") {
    GroupOfFrames g;
    g.frames = {one_face(1, 3), one_face(1, 3)};
    g.frames[1].faces.push_back({0, 2, 1});
    g.frames[1].colors.resize(6);
    REQUIRE_THROWS_AS(validate_gof(g), ConsistencyError);
    try {
      validate_gof(g);
    } catch (const ConsistencyError& e) {
      CHECK(std::string(e.what()).find("face mismatch") != std::string::npos);
    }
  }

  TEST_CASE("color count for one face at U=10 is 66") {
    CHECK(refined_per_face(10) == 66);
    GroupOfFrames ok;
    ok.frames = {one_face(10, 66)};
    CHECK_NOTHROW(validate_gof(ok));
    GroupOfFrames bad;
    bad.frames = {one_face(10, 65)};
    CHECK_THROWS_AS(validate_gof(bad), ConsistencyError);
  }

  TEST_CASE("each violated invariant is reported") {
    auto f = one_face(1, 3);
    f.vertices[1][0] = 1.0;
    CHECK_THROWS_AS(validate_frame(f), ConsistencyError);
    f = one_face(1, 3);
    f.faces[0][2] = 3;
    CHECK_THROWS_AS(validate_frame(f), ConsistencyError);
    f = one_face(1, 3);
    f.vertices[0][2] = -1e-300;
    CHECK_THROWS_AS(validate_frame(f), ConsistencyError);
    CHECK_THROWS_AS(validate_gof(GroupOfFrames{}), ConsistencyError);
  }

  TEST_CASE("degenerate faces are legal") {
    auto f = one_face(3, 10);
    f.faces = {{0, 0, 0}};
    CHECK_NOTHROW(validate_frame(f));
  }

  TEST_CASE("validation is a pure predicate") {
    std::mt19937_64 rng(3);
    GroupOfFrames g;
    g.frames = {oracle::random_frame(rng, 20, 15, 3)};
    const auto copy = g.frames[0].vertices;
    for (int i = 0; i < 3; ++i) CHECK_NOTHROW(validate_gof(g));
    CHECK(copy == g.frames[0].vertices);
  }

  TEST_CASE("N_c = N_f (U+1)(U+2)/2 for every U") {
    for (std::uint32_t u = 1; u < 50; ++u) {
      TriangleCloudFrame f;
      f.upsample = u;
      f.faces.resize(7);
      CHECK(f.expected_color_count() == 7u * (u + 1) * (u + 2) / 2);
    }
  }

  TEST_CASE("codec parameters") {
    CodecParams p;
    CHECK_NOTHROW(p.validate());
    p.depth = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.step_color_inter = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.upsample = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }

  TEST_CASE("BT.601 full-range conversion") {
    const Vec3 white = rgb_to_yuv({255, 255, 255});
    CHECK(white[0] == doctest::Approx(255));
    CHECK(white[1] == doctest::Approx(128));
    CHECK(white[2] == doctest::Approx(128));
    const Vec3 red = rgb_to_yuv({255, 0, 0});
    CHECK(red[0] == doctest::Approx(76.245));
    CHECK(red[2] == doctest::Approx(255.5));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
      const Vec3 rgb{oracle::uniform(rng, 0, 255), oracle::uniform(rng, 0, 255), oracle::uniform(rng, 0, 255)};
      const Vec3 back = yuv_to_rgb(rgb_to_yuv(rgb));
      for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(rgb[k]).epsilon(1e-4));
    }
  }

  TEST_CASE("matrix helpers") {
    Matrix m(2, 3);
    m.set_column(1, std::vector<double>{4, 5});
    CHECK(m.column(1) == std::vector<double>{4, 5});
    CHECK(m.to_vec3_rows()[1] == Vec3{0, 5, 0});
    CHECK_THROWS_AS(m.set_column(0, std::vector<double>{1}), ShapeMismatchError);
    CHECK_THROWS_AS(Matrix(2, 2).to_vec3_rows(), ShapeMismatchError);
  }
}
