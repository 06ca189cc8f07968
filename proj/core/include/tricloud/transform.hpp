#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tricloud/types.hpp"

namespace tricloud::transform {

// Per-level bookkeeping of the region-adaptive hierarchical transform,
// derived from the Morton codes alone. Level l (1-based, l = 1..3J) pairs
// neighbours that differ in bit l-1 of their code.
struct RahtLevel {
  std::vector<std::uint32_t> indices;  // rows of the surviving (left/singleton) nodes, 0-based
  std::vector<std::uint32_t> weights;  // points under each surviving node
  std::vector<std::uint8_t> left_sibling;  // size indices-1; 1 if entries k and k+1 share a parent
};

struct RahtPlan {
  std::uint32_t depth = 0;
  std::size_t point_count = 0;
  std::vector<RahtLevel> levels;  // levels[l-1] holds level l
};

// Output of the forward transform: coefficients in voxel (Morton) row order
// and the propagated weight of every row.
struct CoefficientBlock {
  Matrix coefficients;
  std::vector<std::uint32_t> weights;
};

/// Builds the plan for strictly increasing codes.
RahtPlan raht_plan(std::span<const MortonCode> codes, std::uint32_t depth);

/// Weighted butterflies for levels 1..3J-1 using the plan's per-level weights.
CoefficientBlock raht_forward(const RahtPlan& plan, const Matrix& attributes);
inline CoefficientBlock raht_forward(const VoxelSet& voxels, const Matrix& attributes) {
  return raht_forward(raht_plan(voxels.codes, voxels.depth), attributes);
}

/// Propagated weights only (forward transform of a null signal).
std::vector<std::uint32_t> raht_weights(const RahtPlan& plan);

Matrix raht_inverse(const RahtPlan& plan, const Matrix& coefficients);
inline Matrix raht_inverse(const VoxelSet& voxels, const Matrix& coefficients) {
  return raht_inverse(raht_plan(voxels.codes, voxels.depth), coefficients);
}

enum class QuantizerMode { midstep, midrise };

// Nearest integer, halves away from zero.
double round_half_away(double x);

double quantize(double value, double step, QuantizerMode mode);
Matrix quantize(const Matrix& values, double step, QuantizerMode mode);

// Midstep quantization indices round(x / step) and their reconstruction.
std::vector<std::int64_t> quantize_indices(std::span<const double> values, double step);
std::vector<double> dequantize_indices(std::span<const std::int64_t> indices, double step);

/// Row order in which coefficients are serialized: decreasing weight, ties
/// by ascending row. perm[k] is the row emitted k-th.
std::vector<std::uint32_t> serialize_order(std::span<const std::uint32_t> weights);

}  // namespace tricloud::transform
