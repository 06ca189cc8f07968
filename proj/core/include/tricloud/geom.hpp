#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tricloud/types.hpp"

namespace tricloud::geom {

/// Refined vertices of every face at upsampling factor `upsample`.
///
/// Output ordering is normative: for i = 0..U, for j = 0..U-i, one point per
/// face (faces in input order), point = V1 + (V2-V1)*i/U + (V3-V1)*j/U. Colors
/// of a frame are attached to refined vertices in exactly this order.
std::vector<Vec3> refine(std::span<const Vec3> vertices, std::span<const Face> faces, std::uint32_t upsample);

// Position of refined vertex (face, i, j) in the refine() output.
std::size_t refined_index(std::size_t face, std::uint32_t i, std::uint32_t j, std::size_t face_count,
                          std::uint32_t upsample);

// Triangulation of the refined vertices: U^2 sub-triangles per face, each
// oriented like its parent. Indices point into the refine() output.
std::vector<Face> refined_faces(std::size_t face_count, std::uint32_t upsample);

/// Bit 3k+2 of the code is bit k of x, bit 3k+1 of y, bit 3k of z.
/// Throws RangeError if a coordinate is >= 2^depth or depth > 21.
MortonCode morton_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t depth);
std::array<std::uint32_t, 3> morton_decode(MortonCode code, std::uint32_t depth);

// floor(p * 2^depth) per coordinate; RangeError outside [0,1)^3.
std::array<std::uint32_t, 3> quantize_point(const Vec3& p, std::uint32_t depth);

// (int + 0.5) * 2^-depth
Vec3 voxel_center(MortonCode code, std::uint32_t depth);

struct VoxelizationResult {
  VoxelSet voxel_set;                    // sorted unique codes + attribute means
  std::vector<Vec3> voxel_centers;       // one per code
  std::vector<std::uint32_t> index_map;  // input point -> voxel row
};

/// Sorts the points' Morton codes, merges duplicates and averages the
/// attribute rows of each voxel in double precision. `index_map[i]` is the
/// voxel row of input point i.
VoxelizationResult voxelize(std::span<const Vec3> points, const Matrix* attributes, std::uint32_t depth);
inline VoxelizationResult voxelize(std::span<const Vec3> points, std::uint32_t depth) {
  return voxelize(points, nullptr, depth);
}
inline VoxelizationResult voxelize(std::span<const Vec3> points, const Matrix& attributes,
                                   std::uint32_t depth) {
  return voxelize(points, &attributes, depth);
}

// Mean of attribute rows grouped by a precomputed index map; rows are summed
// in input order, matching voxelize() bit for bit.
Matrix average_by_index(std::span<const std::uint32_t> index_map, std::size_t group_count,
                        const Matrix& attributes);

struct InterpolatedCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> colors;
};

/// Barycentric upsampling of both positions and colors with the same weights
/// and loop order as refine().
InterpolatedCloud refine_interpolate(std::span<const Vec3> vertices, std::span<const Vec3> colors,
                                     std::span<const Face> faces, std::uint32_t upsample);

}  // namespace tricloud::geom
