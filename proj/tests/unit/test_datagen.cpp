#include <cmath>

#include "doctest.h"
#include "tricloud/datagen.hpp"
#include "tricloud/errors.hpp"
#include "tricloud/io.hpp"

using namespace tricloud;
using namespace tricloud::datagen;

namespace {
SequenceParams small(Shape s) {
  SequenceParams p;
  p.shape = s;
  p.frames = 4;
  p.target_faces = 200;
  p.upsample = 3;
  return p;
}
}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("zero amplitude gives identical frames") {
    auto p = small(Shape::wave_plane);
    p.amplitude = 0;
    const auto g = gen_sequence(p).front();
    for (const auto& f : g.frames) {
      CHECK(f.vertices == g.frames[0].vertices);
      CHECK(f.colors == g.frames[0].colors);
    }
  }

  TEST_CASE("one frame gives a lone reference frame") {
    auto p = small(Shape::sphere);
    p.frames = 1;
    const auto gofs = gen_sequence(p);
    REQUIRE(gofs.size() == 1);
    CHECK(gofs[0].frames.size() == 1);
  }

  TEST_CASE("sphere with 2000 faces at U=10 has 132000 colors per frame") {
    SequenceParams p;
    p.frames = 2;
    const auto g = gen_sequence(p).front();
    CHECK(g.frames[0].faces.size() == 2000);
    CHECK(g.frames[0].colors.size() == 132000);
    CHECK(sphere_resolution(2000) == std::pair<std::uint32_t, std::uint32_t>{40, 26});
    const auto m = uv_sphere(7, 4, {0.5, 0.5, 0.5}, 0.25);
    CHECK(m.faces.size() == 2 * 7 * 3);
  }

  TEST_CASE("every shape passes validation and stays inside the margin") {
    for (Shape s : {Shape::sphere, Shape::wave_plane, Shape::two_blobs}) {
      auto p = small(s);
      p.amplitude = 0.15;
      p.gof_size = 3;
      const auto gofs = gen_sequence(p);
      CHECK(gofs.size() == 2);
      const double margin = std::ldexp(1.0, -12);
      for (const auto& g : gofs) {
        CHECK_NOTHROW(validate_gof(g));
        for (const auto& f : g.frames)
          for (const auto& v : f.vertices)
            for (double x : v) {
              CHECK(x >= margin);
              CHECK(x <= 1 - margin);
            }
      }
      CHECK(parse_shape(shape_name(s)) == s);
    }
  }

  TEST_CASE("frames move smoothly and start from the base mesh") {
    auto p = small(Shape::sphere);
    p.frames = 30;
    const auto g = gen_sequence(p).front();
    double worst_step = 0;
    for (std::size_t t = 1; t < g.frames.size(); ++t)
      for (std::size_t i = 0; i < g.frames[t].vertices.size(); ++i)
        for (int k = 0; k < 3; ++k)
          worst_step = std::max(worst_step, std::fabs(g.frames[t].vertices[i][k] - g.frames[t - 1].vertices[i][k]));
    CHECK(worst_step > 0);
    // Peak speed of A sin(2 pi t / 30) is 2 pi A / 30 per frame.
    CHECK(worst_step <= 2 * 3.14159265 * p.amplitude / 30 * 2 + 1e-6);
  }

  TEST_CASE("same seed, same bytes; other seed, other bytes") {
    const auto p = small(Shape::two_blobs);
    io::SequenceFile a{10, gen_sequence(p)}, b{10, gen_sequence(p)};
    CHECK(io::encode_sequence(a) == io::encode_sequence(b));
    auto q = p;
    q.seed = 2;
    io::SequenceFile c{10, gen_sequence(q)};
    CHECK(io::encode_sequence(a) != io::encode_sequence(c));
  }

  TEST_CASE("constant color option") {
    auto p = small(Shape::sphere);
    p.constant_color = true;
    const auto g = gen_sequence(p);
    for (const auto& c : g.front().frames[0].colors) CHECK(c == Vec3{110, 120, 140});
  }

  TEST_CASE("bad parameters") {
    auto p = small(Shape::sphere);
    p.frames = 0;
    CHECK_THROWS_AS(gen_sequence(p), ParameterError);
    p = small(Shape::sphere);
    p.amplitude = 0.2;
    CHECK_THROWS_AS(gen_sequence(p), ParameterError);
    p = small(Shape::sphere);
    p.upsample = 0;
    CHECK_THROWS_AS(gen_sequence(p), ParameterError);
    CHECK_THROWS_AS(parse_shape("cube"), ParameterError);
    CHECK(uniform01(~0ull) < 1.0);
    CHECK(uniform01(0) == 0.0);
  }
}
