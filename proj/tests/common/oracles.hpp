#pragma once

// Slow, obviously-correct re-implementations used to check the library.
// Nothing here calls into the code under test except for plain data types.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tricloud/types.hpp"

namespace oracle {

using tricloud::Face;
using tricloud::Matrix;
using tricloud::Vec3;

inline std::uint64_t morton(std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t depth) {
  std::uint64_t code = 0;
  for (std::uint32_t k = 0; k < depth; ++k) {
    code |= std::uint64_t((x >> k) & 1u) << (3 * k + 2);
    code |= std::uint64_t((y >> k) & 1u) << (3 * k + 1);
    code |= std::uint64_t((z >> k) & 1u) << (3 * k);
  }
  return code;
}

inline std::array<std::uint32_t, 3> unmorton(std::uint64_t code, std::uint32_t depth) {
  std::array<std::uint32_t, 3> p{};
  for (std::uint32_t k = 0; k < depth; ++k) {
    p[0] |= std::uint32_t((code >> (3 * k + 2)) & 1u) << k;
    p[1] |= std::uint32_t((code >> (3 * k + 1)) & 1u) << k;
    p[2] |= std::uint32_t((code >> (3 * k)) & 1u) << k;
  }
  return p;
}

inline std::uint64_t point_code(const Vec3& p, std::uint32_t depth) {
  const double s = std::ldexp(1.0, int(depth));
  return morton(std::uint32_t(std::floor(p[0] * s)), std::uint32_t(std::floor(p[1] * s)),
                std::uint32_t(std::floor(p[2] * s)), depth);
}

struct Voxelized {
  std::vector<std::uint64_t> codes;
  Matrix means;
  std::vector<std::uint32_t> index_map;
};

// std::map keyed by code; sums accumulate in input order.
inline Voxelized voxelize(const std::vector<Vec3>& points, const Matrix& attrs, std::uint32_t depth) {
  struct Acc {
    std::vector<double> sum;
    std::size_t n = 0;
  };
  std::map<std::uint64_t, Acc> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& a = cells[point_code(points[i], depth)];
    if (a.sum.empty()) a.sum.assign(attrs.cols(), 0.0);
    for (std::size_t c = 0; c < attrs.cols(); ++c) a.sum[c] += attrs(i, c);
    ++a.n;
  }
  Voxelized out;
  out.means = Matrix(cells.size(), attrs.cols());
  std::map<std::uint64_t, std::uint32_t> row;
  for (const auto& [code, a] : cells) {
    row[code] = std::uint32_t(out.codes.size());
    for (std::size_t c = 0; c < attrs.cols(); ++c) out.means(out.codes.size(), c) = a.sum[c] / double(a.n);
    out.codes.push_back(code);
  }
  for (const auto& p : points) out.index_map.push_back(row.at(point_code(p, depth)));
  return out;
}

struct RahtOut {
  Matrix coefficients;
  std::vector<std::uint32_t> weights;
};

// Bottom-up merge of sibling regions kept in a map from code prefix to node.
// Levels 1..3J-1 are applied, so at most two regions survive.
inline RahtOut raht(const std::vector<std::uint64_t>& codes, const Matrix& attrs, std::uint32_t depth) {
  struct Node {
    std::uint32_t row;
    std::uint32_t weight;
    std::vector<double> x;
  };
  const std::size_t cols = attrs.cols();
  std::map<std::uint64_t, Node> level;
  for (std::uint32_t i = 0; i < codes.size(); ++i) {
    std::vector<double> x(cols);
    for (std::size_t c = 0; c < cols; ++c) x[c] = attrs(i, c);
    level[codes[i]] = {i, 1, x};
  }
  RahtOut out{Matrix(codes.size(), cols), std::vector<std::uint32_t>(codes.size(), 0)};
  for (std::uint32_t l = 1; l + 1 <= 3 * depth; ++l) {
    std::map<std::uint64_t, Node> next;
    for (auto it = level.begin(); it != level.end();) {
      const std::uint64_t parent = it->first >> 1;
      auto nx = std::next(it);
      if (nx != level.end() && (nx->first >> 1) == parent) {
        const Node& lo = it->second;
        const Node& hi = nx->second;
        const double sum = double(lo.weight) + hi.weight;
        const double a = std::sqrt(lo.weight / sum), b = std::sqrt(hi.weight / sum);
        Node merged{lo.row, lo.weight + hi.weight, std::vector<double>(cols)};
        for (std::size_t c = 0; c < cols; ++c) {
          out.coefficients(hi.row, c) = -b * lo.x[c] + a * hi.x[c];
          merged.x[c] = a * lo.x[c] + b * hi.x[c];
        }
        out.weights[hi.row] = merged.weight;
        next[parent] = std::move(merged);
        it = std::next(nx);
      } else {
        next[parent] = it->second;
        ++it;
      }
    }
    level = std::move(next);
  }
  for (const auto& [code, n] : level) {
    for (std::size_t c = 0; c < cols; ++c) out.coefficients(n.row, c) = n.x[c];
    out.weights[n.row] = n.weight;
  }
  return out;
}

// Adaptive run-length Golomb-Rice coder written against a '0'/'1' string.
// Parameters are scaled by 8; k and kr never exceed 10.
inline std::vector<std::uint8_t> rlgr(const std::vector<std::int64_t>& s) {
  std::string bits;
  int kp = 8, krp = 8;
  auto up = [](int& p, int d) { p = std::min(p + d, 80); };
  auto down = [](int& p, int d) { p = std::max(p - d, 0); };
  auto binary = [&](std::uint64_t v, int n) {
    for (int i = n - 1; i >= 0; --i) bits += ((v >> i) & 1u) ? '1' : '0';
  };
  auto golomb = [&](std::uint64_t v) {
    const int kr = krp / 8;
    const std::uint64_t prefix = v >> kr;
    if (prefix < 32) {
      bits.append(prefix, '1');
      bits += '0';
      binary(v, kr);
    } else {
      bits.append(32, '1');
      const int w = 64 - std::countl_zero(v);
      binary(std::uint64_t(w - 1), 6);
      binary(v, w);
    }
    if (prefix == 0)
      down(krp, 2);
    else if (prefix > 1)
      up(krp, int(std::min<std::uint64_t>(prefix, 80)));
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (kp / 8 > 0) {
      std::uint64_t zeros = 0;
      while (i < s.size() && s[i] == 0) ++zeros, ++i;
      while (zeros >= (std::uint64_t{1} << (kp / 8))) {
        bits += '0';
        zeros -= std::uint64_t{1} << (kp / 8);
        up(kp, 4);
      }
      bits += '1';
      binary(zeros, kp / 8);
      if (i < s.size()) {
        const std::int64_t v = s[i++];
        bits += v < 0 ? '1' : '0';
        golomb(std::uint64_t(v < 0 ? -v : v) - 1);
        down(kp, 6);
      }
    } else {
      const std::int64_t v = s[i++];
      const std::uint64_t u = v >= 0 ? std::uint64_t(v) * 2 : std::uint64_t(-v) * 2 - 1;
      golomb(u);
      if (u == 0)
        up(kp, 3);
      else
        down(kp, 3);
    }
  }
  while (bits.size() % 8) bits += '0';
  std::vector<std::uint8_t> out;
  for (std::size_t b = 0; b < bits.size(); b += 8) out.push_back(std::uint8_t(std::stoul(bits.substr(b, 8), nullptr, 2)));
  return out;
}

inline std::int64_t lattice_d2(std::uint64_t a, std::uint64_t b, std::uint32_t depth) {
  const auto p = unmorton(a, depth), q = unmorton(b, depth);
  std::int64_t d = 0;
  for (int k = 0; k < 3; ++k) d += (std::int64_t(p[k]) - q[k]) * (std::int64_t(p[k]) - q[k]);
  return d;
}

// O(N M) nearest neighbours, first (lowest) index wins ties.
inline std::vector<std::uint32_t> nearest(const std::vector<std::uint64_t>& query, const std::vector<std::uint64_t>& target,
                                          std::uint32_t depth) {
  std::vector<std::uint32_t> out;
  for (auto q : query) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint32_t arg = 0;
    for (std::uint32_t j = 0; j < target.size(); ++j) {
      const auto d = lattice_d2(q, target[j], depth);
      if (d < best) best = d, arg = j;
    }
    out.push_back(arg);
  }
  return out;
}

struct Matching {
  double fwd_g, bwd_g;
  std::array<double, 3> fwd_c, bwd_c;
};

// Geometry from voxel centers in unit coordinates.
inline Matching matching(const tricloud::VoxelSet& s, const tricloud::VoxelSet& t) {
  auto center = [](std::uint64_t code, std::uint32_t depth) {
    const auto p = unmorton(code, depth);
    const double h = std::ldexp(1.0, -int(depth));
    return Vec3{(p[0] + 0.5) * h, (p[1] + 0.5) * h, (p[2] + 0.5) * h};
  };
  auto one = [&](const tricloud::VoxelSet& a, const tricloud::VoxelSet& b, double& g, std::array<double, 3>& c) {
    const auto nn = nearest(a.codes, b.codes, a.depth);
    g = 0;
    c = {0, 0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto p = center(a.codes[i], a.depth), q = center(b.codes[nn[i]], b.depth);
      for (int k = 0; k < 3; ++k) g += (p[k] - q[k]) * (p[k] - q[k]);
      for (int k = 0; k < 3; ++k) c[k] += std::pow(a.attributes(i, k) - b.attributes(nn[i], k), 2);
    }
    g /= double(a.size());
    for (auto& x : c) x /= double(a.size());
  };
  Matching m{};
  one(s, t, m.fwd_g, m.fwd_c);
  one(t, s, m.bwd_g, m.bwd_c);
  return m;
}

// Per-pixel scan over every voxel: (u, v) are the two remaining axes in
// xyz order. Face f looks along axis f/2; odd faces sit on the + side.
inline std::vector<Vec3> project(const tricloud::VoxelSet& v, int face) {
  const std::uint32_t side = 1u << v.depth;
  const int axis = face / 2;
  const int ua = axis == 0 ? 1 : 0, va = axis == 2 ? 1 : 2;
  std::vector<Vec3> img(std::size_t(side) * side, Vec3{128, 128, 128});
  for (std::uint32_t u = 0; u < side; ++u)
    for (std::uint32_t w = 0; w < side; ++w) {
      long best_depth = -1;
      std::size_t best = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto p = unmorton(v.codes[i], v.depth);
        if (p[ua] != u || p[va] != w) continue;
        const long d = face % 2 ? long(side - 1 - p[axis]) : long(p[axis]);
        if (best_depth < 0 || d < best_depth) best_depth = d, best = i;
      }
      if (best_depth >= 0) img[std::size_t(u) * side + w] = {v.attributes(best, 0), v.attributes(best, 1), v.attributes(best, 2)};
    }
  return img;
}

inline double psnr(double mse, double peak2) {
  return mse == 0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(peak2 / mse);
}

// Dense cloud as a list of (position, color) samples. Each coarse face is
// split into a U x U barycentric grid; each sub-triangle is sampled on its own
// U_interp grid. The enumeration order is private to this oracle, but two
// frames with the same faces are sampled in the same order.
inline void dense(const tricloud::TriangleCloudFrame& f, std::uint32_t ui, std::vector<Vec3>& pts, std::vector<Vec3>& cols) {
  const std::uint32_t U = f.upsample;
  // Refined vertex (i, j) of face m lives at color row step(i, j) * N_f + m.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> step;
  for (std::uint32_t i = 0; i <= U; ++i)
    for (std::uint32_t j = 0; i + j <= U; ++j) step.emplace(std::make_pair(i, j), step.size());
  auto lerp3 = [](const Vec3& a, const Vec3& b, const Vec3& c, double s, double t) {
    Vec3 o;
    for (int k = 0; k < 3; ++k) o[k] = a[k] + (b[k] - a[k]) * s + (c[k] - a[k]) * t;
    return o;
  };
  for (std::size_t m = 0; m < f.faces.size(); ++m) {
    const Vec3& A = f.vertices[f.faces[m][0]];
    const Vec3& B = f.vertices[f.faces[m][1]];
    const Vec3& C = f.vertices[f.faces[m][2]];
    auto node = [&](std::uint32_t i, std::uint32_t j) {
      return std::make_pair(lerp3(A, B, C, double(i) / U, double(j) / U), f.colors[step.at({i, j}) * f.faces.size() + m]);
    };
    std::vector<std::array<std::pair<std::uint32_t, std::uint32_t>, 3>> subs;
    for (std::uint32_t i = 0; i < U; ++i)
      for (std::uint32_t j = 0; i + j < U; ++j) {
        subs.push_back({{{i, j}, {i + 1, j}, {i, j + 1}}});
        if (i + j + 1 < U) subs.push_back({{{i + 1, j}, {i + 1, j + 1}, {i, j + 1}}});
      }
    for (const auto& s : subs) {
      const auto [p0, c0] = node(s[0].first, s[0].second);
      const auto [p1, c1] = node(s[1].first, s[1].second);
      const auto [p2, c2] = node(s[2].first, s[2].second);
      for (std::uint32_t i = 0; i <= ui; ++i)
        for (std::uint32_t j = 0; i + j <= ui; ++j) {
          pts.push_back(lerp3(p0, p1, p2, double(i) / ui, double(j) / ui));
          cols.push_back(lerp3(c0, c1, c2, double(i) / ui, double(j) / ui));
        }
    }
  }
}

struct TriPsnr {
  double g;
  std::array<double, 3> c;
};

inline TriPsnr triangle_cloud(const std::vector<tricloud::TriangleCloudFrame>& a,
                              const std::vector<tricloud::TriangleCloudFrame>& b, std::uint32_t ui) {
  double g = 0;
  std::array<double, 3> c{};
  for (std::size_t t = 0; t < a.size(); ++t) {
    std::vector<Vec3> pa, ca, pb, cb;
    dense(a[t], ui, pa, ca);
    dense(b[t], ui, pb, cb);
    double sg = 0;
    std::array<double, 3> sc{};
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (int k = 0; k < 3; ++k) {
        sg += (pa[i][k] - pb[i][k]) * (pa[i][k] - pb[i][k]);
        sc[k] += (ca[i][k] - cb[i][k]) * (ca[i][k] - cb[i][k]);
      }
    g += sg / (3.0 * pa.size());
    for (int k = 0; k < 3; ++k) c[k] += sc[k] / (255.0 * 255.0 * pa.size());
  }
  TriPsnr out{psnr(g / a.size(), 1.0), {}};
  for (int k = 0; k < 3; ++k) out.c[k] = psnr(c[k] / a.size(), 1.0);
  return out;
}

// Random helpers shared by the suites.
inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
}

inline tricloud::VoxelSet random_voxels(std::mt19937_64& rng, std::size_t n, std::uint32_t depth, bool colored) {
  std::map<std::uint64_t, int> seen;
  const std::uint64_t space = std::uint64_t{1} << (3 * depth);
  n = std::min<std::uint64_t>(n, space);
  while (seen.size() < n) seen[rng() % space] = 0;
  tricloud::VoxelSet v;
  v.depth = depth;
  for (auto& [c, _] : seen) v.codes.push_back(c);
  if (colored) {
    v.attributes = Matrix(v.size(), 3);
    for (double& x : v.attributes.data()) x = std::round(uniform(rng, 0, 255));
  }
  return v;
}

inline tricloud::TriangleCloudFrame random_frame(std::mt19937_64& rng, std::size_t vertices, std::size_t faces,
                                                 std::uint32_t upsample, double lo = 0.1, double hi = 0.9) {
  tricloud::TriangleCloudFrame f;
  f.upsample = upsample;
  for (std::size_t i = 0; i < vertices; ++i) f.vertices.push_back({uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)});
  for (std::size_t m = 0; m < faces; ++m)
    f.faces.push_back({std::uint32_t(rng() % vertices), std::uint32_t(rng() % vertices), std::uint32_t(rng() % vertices)});
  f.colors.resize(f.expected_color_count());
  for (auto& c : f.colors) c = {std::round(uniform(rng, 0, 255)), std::round(uniform(rng, 0, 255)), std::round(uniform(rng, 0, 255))};
  return f;
}

}  // namespace oracle
