#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tricloud/types.hpp"

// Synthetic dynamic triangle clouds: a tessellated base surface deformed by
// smooth sinusoidal fields, with procedural YUV colors at refined vertices.
namespace tricloud::datagen {

enum class Shape { sphere, wave_plane, two_blobs };

Shape parse_shape(std::string_view name);  // ParameterError on unknown names
std::string_view shape_name(Shape shape);

struct SequenceParams {
  Shape shape = Shape::sphere;
  std::uint32_t frames = 30;
  std::uint32_t target_faces = 2000;
  std::uint32_t upsample = 10;
  double amplitude = 0.02;  // peak displacement in unit-cube coordinates
  std::uint64_t seed = 1;
  std::uint32_t gof_size = 0;  // 0: all frames in one GOF
  std::uint32_t depth = 10;    // bounds the coordinates to [2^-(J+2), 1 - 2^-(J+2)]
  bool constant_color = false;
  void validate() const;
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

// Latitude/longitude sphere: 2 * slices * (rings - 1) faces.
Mesh uv_sphere(std::uint32_t slices, std::uint32_t rings, const Vec3& center, double radius);
// Slice/ring counts whose face count is closest to the target.
std::pair<std::uint32_t, std::uint32_t> sphere_resolution(std::uint32_t target_faces);

Mesh base_mesh(Shape shape, std::uint32_t target_faces);

std::vector<GroupOfFrames> gen_sequence(const SequenceParams& params);

// Portable uniform double in [0, 1) from the 53 high bits of a 64-bit draw.
double uniform01(std::uint64_t bits);

}  // namespace tricloud::datagen
