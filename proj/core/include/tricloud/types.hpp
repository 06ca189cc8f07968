#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tricloud {

using Vec3 = std::array<double, 3>;
using Face = std::array<std::uint32_t, 3>;
using MortonCode = std::uint64_t;

// Dense row-major matrix of doubles. Used for per-point and per-voxel
// attribute rows (colors, displacements, transform coefficients).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::span<const Vec3> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::vector<Vec3> to_vec3_rows() const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Number of refined vertices a face yields at upsampling factor U.
constexpr std::size_t refined_per_face(std::uint32_t upsample) {
  return static_cast<std::size_t>(upsample + 1) * (upsample + 2) / 2;
}

// One frame of a dynamic triangle cloud. Vertices live in the unit cube,
// colors are YUV reals attached to the refined vertices of every face in
// the normative refinement order (see geom::refine).
struct TriangleCloudFrame {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> colors;
  std::uint32_t upsample = 1;

  std::size_t expected_color_count() const {
    return faces.size() * refined_per_face(upsample);
  }
};

// Reference frame first, predicted frames after it. All frames share the
// face list and the vertex / refined-vertex index correspondence.
struct GroupOfFrames {
  std::vector<TriangleCloudFrame> frames;
};

struct CodecParams {
  std::uint32_t depth = 10;       // J: voxel edge is 2^-J
  std::uint32_t upsample = 10;    // U
  double step_motion = 1.0;       // in voxel units
  double step_color_intra = 1.0;  // in color-component units
  double step_color_inter = 1.0;

  void validate() const;
};

// Morton-ordered occupied voxels at a given depth, optionally carrying one
// attribute row per voxel.
struct VoxelSet {
  std::uint32_t depth = 0;
  std::vector<MortonCode> codes;
  Matrix attributes;

  std::size_t size() const { return codes.size(); }
  bool has_attributes() const { return attributes.rows() == codes.size() && attributes.cols() > 0; }

  friend bool operator==(const VoxelSet&, const VoxelSet&) = default;
};

// Throws ConsistencyError naming the first violated invariant. Returns the
// group unchanged otherwise.
const GroupOfFrames& validate_gof(const GroupOfFrames& gof);
void validate_frame(const TriangleCloudFrame& frame);

// BT.601 full-range conversion, components in [0, 255].
Vec3 rgb_to_yuv(const Vec3& rgb);
Vec3 yuv_to_rgb(const Vec3& yuv);

}  // namespace tricloud
