#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tricloud/types.hpp"

// Distortion and rate measures. All PSNRs use W = 1 (unit cube) for
// geometry and 255 for color; a zero error yields +infinity.
namespace tricloud::metrics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFramesPerSecond = 30.0;
inline constexpr double kNeutralGray = 128.0;

// -10 log10(mse / peak_squared), +inf for mse == 0.
double psnr(double mse, double peak_squared);

struct Psnr {
  double geometry = kInfinity;
  std::array<double, 3> color{kInfinity, kInfinity, kInfinity};  // Y, U, V
};

// Transform-coding distortion on voxelized quantities, one entry per frame.
// Geometry error per frame is |V - V^|^2 / (3 N_v); color per component is
// |Y - Y^|^2 / (255^2 N_rv). Frame means are averaged before the log.
double psnr_transform_geometry(std::span<const std::vector<Vec3>> reference,
                               std::span<const std::vector<Vec3>> reconstruction);
std::array<double, 3> psnr_transform_color(std::span<const Matrix> reference, std::span<const Matrix> reconstruction);

// Per-frame refine + interpolate: positions and colors of the dense cloud
// used by the triangle-cloud, projection and matching measures.
struct DenseCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> colors;
};
DenseCloud dense_cloud(const TriangleCloudFrame& frame, std::uint32_t upsample_interp);

// Triangle-cloud distortion computed on the dense clouds (index-wise).
Psnr psnr_triangle_cloud(std::span<const TriangleCloudFrame> reference,
                         std::span<const TriangleCloudFrame> reconstruction, std::uint32_t upsample_interp);

// Voxelizes a colored cloud for metric use. Coordinates outside [0,1) are
// clamped into the cube first, as a decoded cloud may leave it slightly.
VoxelSet voxelize_colored(std::span<const Vec3> points, std::span<const Vec3> colors, std::uint32_t depth);

// One projected face: size x size YUV pixels, row-major over the two
// remaining axes in (x, y, z) order.
struct FaceImage {
  std::uint32_t size = 0;
  std::vector<Vec3> pixels;
  const Vec3& at(std::uint32_t u, std::uint32_t v) const { return pixels[std::size_t(u) * size + v]; }
};

// Faces in the order -x, +x, -y, +y, -z, +z.
enum class CubeFace : int { neg_x = 0, pos_x, neg_y, pos_y, neg_z, pos_z };

FaceImage project_face(const VoxelSet& voxels, CubeFace face);
std::array<FaceImage, 6> project_to_faces(const VoxelSet& voxels);

// Summed squared error per component over the six faces of one frame.
std::array<double, 3> projection_squared_error(const VoxelSet& reference, const VoxelSet& reconstruction);

// Pools the squared error over faces and frames, then PSNR per component.
std::array<double, 3> projection_psnr(std::span<const VoxelSet> reference, std::span<const VoxelSet> reconstruction);
std::array<double, 3> projection_psnr(std::span<const TriangleCloudFrame> reference,
                                      std::span<const TriangleCloudFrame> reconstruction, std::uint32_t depth,
                                      std::uint32_t upsample_interp);

// Nearest neighbor of every query voxel among the target voxels, in
// squared lattice distance; ties go to the lowest Morton code.
std::vector<std::uint32_t> nearest_neighbors(const VoxelSet& query, const VoxelSet& target);

struct MatchingDistortion {
  double forward_geometry = 0;   // S -> T
  double backward_geometry = 0;  // S <- T
  std::array<double, 3> forward_color{};
  std::array<double, 3> backward_color{};
  double geometry() const;                 // symmetric: max of both directions
  std::array<double, 3> color() const;
};

// S and T carry colors as attributes; geometry uses voxel centers.
MatchingDistortion matching_distortion(const VoxelSet& source, const VoxelSet& target);

// Averages symmetric distortions over frames and converts to dB.
Psnr matching_psnr(std::span<const MatchingDistortion> frames);
Psnr matching_psnr(std::span<const TriangleCloudFrame> reference, std::span<const TriangleCloudFrame> reconstruction,
                   std::uint32_t depth, std::uint32_t upsample_interp);

struct Rates {
  double mbps = 0;
  double bpv = 0;
};
double rate_mbps(std::uint64_t bits, std::size_t frames);
double rate_bpv(std::uint64_t bits, std::uint64_t total_voxels);
Rates rates(std::uint64_t bits, std::size_t frames, std::span<const std::size_t> voxel_counts);

}  // namespace tricloud::metrics
