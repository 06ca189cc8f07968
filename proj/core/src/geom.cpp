#include "tricloud/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tricloud/errors.hpp"

namespace tricloud::geom {
namespace {

constexpr std::uint32_t kMaxDepth = 21;

void check_upsample(std::uint32_t upsample) {
  if (upsample < 1) throw ParameterError("upsample factor must be >= 1");
}

template <typename Fn>
void for_each_refined(std::size_t face_count, std::uint32_t upsample, Fn&& fn) {
  for (std::uint32_t i = 0; i <= upsample; ++i)
    for (std::uint32_t j = 0; j <= upsample - i; ++j)
      for (std::size_t m = 0; m < face_count; ++m) fn(m, i, j);
}

Vec3 combine(const Vec3& a, const Vec3& b, const Vec3& c, std::uint32_t i, std::uint32_t j, double u) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) out[k] = a[k] + (b[k] - a[k]) * i / u + (c[k] - a[k]) * j / u;
  return out;
}

}  // namespace

std::vector<Vec3> refine(std::span<const Vec3> vertices, std::span<const Face> faces, std::uint32_t upsample) {
  check_upsample(upsample);
  for (const auto& f : faces)
    for (auto idx : f)
      if (idx >= vertices.size()) throw RangeError("face index out of range");
  std::vector<Vec3> out;
  out.reserve(faces.size() * refined_per_face(upsample));
  const double u = upsample;
  for_each_refined(faces.size(), upsample, [&](std::size_t m, std::uint32_t i, std::uint32_t j) {
    const auto& f = faces[m];
    out.push_back(combine(vertices[f[0]], vertices[f[1]], vertices[f[2]], i, j, u));
  });
  return out;
}

std::size_t refined_index(std::size_t face, std::uint32_t i, std::uint32_t j, std::size_t face_count,
                          std::uint32_t upsample) {
  // Steps before row i: sum_{i' < i} (U - i' + 1).
  const std::size_t step = static_cast<std::size_t>(i) * (upsample + 1) -
                           static_cast<std::size_t>(i) * (i - (i > 0 ? 1 : 0)) / 2 + j;
  return step * face_count + face;
}

std::vector<Face> refined_faces(std::size_t face_count, std::uint32_t upsample) {
  check_upsample(upsample);
  std::vector<Face> out;
  out.reserve(face_count * upsample * upsample);
  auto idx = [&](std::size_t m, std::uint32_t i, std::uint32_t j) {
    return static_cast<std::uint32_t>(refined_index(m, i, j, face_count, upsample));
  };
  for (std::size_t m = 0; m < face_count; ++m) {
    for (std::uint32_t i = 0; i < upsample; ++i) {
      for (std::uint32_t j = 0; j + i < upsample; ++j) {
        out.push_back({idx(m, i, j), idx(m, i + 1, j), idx(m, i, j + 1)});
        if (i + j + 2 <= upsample) out.push_back({idx(m, i + 1, j), idx(m, i + 1, j + 1), idx(m, i, j + 1)});
      }
    }
  }
  return out;
}

namespace {

// Bit k of v moves to bit 3k.
std::uint64_t spread3(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

std::uint32_t compact3(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(v);
}

}  // namespace

MortonCode morton_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t depth) {
  if (depth > kMaxDepth) throw RangeError("depth exceeds 21 bits per axis");
  const std::uint64_t limit = std::uint64_t{1} << depth;
  if (x >= limit || y >= limit || z >= limit)
    throw RangeError("coordinate exceeds 2^" + std::to_string(depth) + " - 1");
  return (spread3(x) << 2) | (spread3(y) << 1) | spread3(z);
}

std::array<std::uint32_t, 3> morton_decode(MortonCode code, std::uint32_t depth) {
  if (depth > kMaxDepth) throw RangeError("depth exceeds 21 bits per axis");
  if (depth < kMaxDepth && (code >> (3 * depth)) != 0) throw RangeError("Morton code exceeds 3*depth bits");
  return {compact3(code >> 2), compact3(code >> 1), compact3(code)};
}

std::array<std::uint32_t, 3> quantize_point(const Vec3& p, std::uint32_t depth) {
  const double scale = std::ldexp(1.0, static_cast<int>(depth));
  std::array<std::uint32_t, 3> out{};
  for (int k = 0; k < 3; ++k) {
    if (!(p[k] >= 0.0 && p[k] < 1.0)) throw RangeError("point coordinate outside [0,1)");
    out[k] = static_cast<std::uint32_t>(std::floor(p[k] * scale));
  }
  return out;
}

Vec3 voxel_center(MortonCode code, std::uint32_t depth) {
  const auto xyz = morton_decode(code, depth);
  const double inv = std::ldexp(1.0, -static_cast<int>(depth));
  return {(xyz[0] + 0.5) * inv, (xyz[1] + 0.5) * inv, (xyz[2] + 0.5) * inv};
}

VoxelizationResult voxelize(std::span<const Vec3> points, const Matrix* attributes, std::uint32_t depth) {
  if (attributes && attributes->rows() != points.size())
    throw ShapeMismatchError("attribute rows must match point count");
  const std::size_t n = points.size();
  // (code, input index) pairs: sorting them is a stable sort by code.
  std::vector<std::pair<MortonCode, std::uint32_t>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = quantize_point(points[i], depth);
    keyed[i] = {morton_encode(q[0], q[1], q[2], depth), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());

  VoxelizationResult res;
  res.voxel_set.depth = depth;
  res.index_map.resize(n);
  for (const auto& [code, i] : keyed) {
    if (res.voxel_set.codes.empty() || res.voxel_set.codes.back() != code) res.voxel_set.codes.push_back(code);
    res.index_map[i] = static_cast<std::uint32_t>(res.voxel_set.codes.size() - 1);
  }
  res.voxel_centers.reserve(res.voxel_set.size());
  for (auto c : res.voxel_set.codes) res.voxel_centers.push_back(voxel_center(c, depth));
  if (attributes) res.voxel_set.attributes = average_by_index(res.index_map, res.voxel_set.size(), *attributes);
  return res;
}

Matrix average_by_index(std::span<const std::uint32_t> index_map, std::size_t group_count,
                        const Matrix& attributes) {
  if (attributes.rows() != index_map.size()) throw ShapeMismatchError("attribute rows must match index map");
  const std::size_t k = attributes.cols();
  Matrix sums(group_count, k);
  std::vector<std::size_t> counts(group_count, 0);
  for (std::size_t i = 0; i < index_map.size(); ++i) {
    const auto g = index_map[i];
    if (g >= group_count) throw RangeError("index map entry out of range");
    ++counts[g];
    for (std::size_t c = 0; c < k; ++c) sums(g, c) += attributes(i, c);
  }
  for (std::size_t g = 0; g < group_count; ++g) {
    if (counts[g] == 0) throw ConsistencyError("index map leaves a voxel without members");
    for (std::size_t c = 0; c < k; ++c) sums(g, c) /= static_cast<double>(counts[g]);
  }
  return sums;
}

InterpolatedCloud refine_interpolate(std::span<const Vec3> vertices, std::span<const Vec3> colors,
                                     std::span<const Face> faces, std::uint32_t upsample) {
  check_upsample(upsample);
  if (vertices.size() != colors.size()) throw ShapeMismatchError("vertices and colors must correspond 1-1");
  for (const auto& f : faces)
    for (auto idx : f)
      if (idx >= vertices.size()) throw RangeError("face index out of range");
  InterpolatedCloud out;
  const auto total = faces.size() * refined_per_face(upsample);
  out.points.reserve(total);
  out.colors.reserve(total);
  const double u = upsample;
  for_each_refined(faces.size(), upsample, [&](std::size_t m, std::uint32_t i, std::uint32_t j) {
    const auto& f = faces[m];
    out.points.push_back(combine(vertices[f[0]], vertices[f[1]], vertices[f[2]], i, j, u));
    out.colors.push_back(combine(colors[f[0]], colors[f[1]], colors[f[2]], i, j, u));
  });
  return out;
}

}  // namespace tricloud::geom
