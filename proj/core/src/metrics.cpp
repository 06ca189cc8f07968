#include "tricloud/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "tricloud/errors.hpp"
#include "tricloud/geom.hpp"

namespace tricloud::metrics {
namespace {

constexpr double kColorPeakSq = 255.0 * 255.0;

double squared_distance(const Vec3& a, const Vec3& b) {
  double s = 0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

void require_same_frame_count(std::size_t a, std::size_t b) {
  if (a != b) throw ShapeMismatchError("sequences have different frame counts");
  if (a == 0) throw ShapeMismatchError("empty sequence");
}

using Lattice = std::array<std::int64_t, 3>;

std::vector<Lattice> lattice_points(const VoxelSet& v) {
  std::vector<Lattice> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = geom::morton_decode(v.codes[i], v.depth);
    out[i] = {p[0], p[1], p[2]};
  }
  return out;
}

std::int64_t lattice_d2(const Lattice& a, const Lattice& b) {
  std::int64_t s = 0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

// Buckets of 2^k voxels per axis over the target. A bucket key is the
// Morton code shifted right by 3k, so each bucket is a contiguous run of
// the sorted target codes.
class Grid {
 public:
  Grid(const VoxelSet& target, const std::vector<Lattice>& pts) : codes_(target.codes), pts_(pts) {
    const auto n = target.size();
    for (std::uint32_t k = 1; k < target.depth; ++k) {
      std::size_t buckets = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (i == 0 || (codes_[i] >> 3 * k) != (codes_[i - 1] >> 3 * k)) ++buckets;
      if (n > 8 * buckets) break;
      shift_ = k;
    }
    buckets_.reserve(n / 4 + 16);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto key = codes_[i] >> 3 * shift_;
      auto [it, fresh] = buckets_.try_emplace(key, i, i + 1);
      if (!fresh) it->second.second = i + 1;
    }
    extent_ = std::int64_t{1} << (target.depth - shift_);
  }

  std::uint32_t nearest(MortonCode code, const Lattice& q) const {
    // An occupied query voxel is its own unique nearest neighbour.
    const auto hit = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (hit != codes_.end() && *hit == code) return static_cast<std::uint32_t>(hit - codes_.begin());

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint32_t best_idx = 0;
    const std::int64_t side = std::int64_t{1} << shift_;
    const Lattice c{q[0] >> shift_, q[1] >> shift_, q[2] >> shift_};
    std::size_t visited = 0;
    for (std::int64_t r = 0;; ++r) {
      // Far from every cluster the shells get huge; a flat scan is cheaper.
      if (visited > 4 * pts_.size()) return linear_nearest(q);
      bool any_cell = false;
      for (std::int64_t dx = -r; dx <= r; ++dx)
        for (std::int64_t dy = -r; dy <= r; ++dy) {
          const bool shell = std::max(std::abs(dx), std::abs(dy)) == r;
          for (std::int64_t dz = -r; dz <= r; dz += (shell || r == 0) ? 1 : 2 * r) {
            const Lattice cc{c[0] + dx, c[1] + dy, c[2] + dz};
            if (!inside(cc)) continue;
            any_cell = true;
            ++visited;
            const auto it = buckets_.find(geom::morton_encode(std::uint32_t(cc[0]), std::uint32_t(cc[1]),
                                                              std::uint32_t(cc[2]), 21));
            if (it == buckets_.end()) continue;
            for (auto i = it->second.first; i < it->second.second; ++i) {
              const auto d = lattice_d2(q, pts_[i]);
              if (d < best || (d == best && i < best_idx)) {
                best = d;
                best_idx = i;
              }
            }
          }
        }
      // Anything beyond ring r is at least r*side+1 away on some axis.
      const std::int64_t bound = r * side + 1;
      if (best < bound * bound) break;
      if (!any_cell) break;
    }
    return best_idx;
  }

 private:
  std::uint32_t linear_nearest(const Lattice& q) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint32_t best_idx = 0;
    for (std::uint32_t i = 0; i < pts_.size(); ++i) {
      const auto d = lattice_d2(q, pts_[i]);
      if (d < best) {
        best = d;
        best_idx = i;
      }
    }
    return best_idx;
  }

  bool inside(const Lattice& c) const {
    return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < extent_ && c[1] < extent_ && c[2] < extent_;
  }

  const std::vector<MortonCode>& codes_;
  const std::vector<Lattice>& pts_;
  std::uint32_t shift_ = 0;
  std::int64_t extent_ = 1;
  std::unordered_map<MortonCode, std::pair<std::uint32_t, std::uint32_t>> buckets_;
};

// Winning voxel row per occupied pixel, sorted by pixel key.
std::vector<std::pair<std::uint64_t, std::uint32_t>> sparse_projection(const VoxelSet& voxels, CubeFace face) {
  const int axis = static_cast<int>(face) / 2;
  const bool positive = static_cast<int>(face) % 2 == 1;
  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  const std::uint64_t size = std::uint64_t{1} << voxels.depth;
  struct Entry {
    std::uint64_t key;
    std::int64_t depth;
    std::uint32_t row;
  };
  std::vector<Entry> entries(voxels.size());
  for (std::uint32_t i = 0; i < voxels.size(); ++i) {
    const auto p = geom::morton_decode(voxels.codes[i], voxels.depth);
    entries[i] = {p[ua] * size + p[va], positive ? -std::int64_t(p[axis]) : std::int64_t(p[axis]), i};
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.key != b.key ? a.key < b.key : a.depth < b.depth; });
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (const auto& e : entries)
    if (out.empty() || out.back().first != e.key) out.emplace_back(e.key, e.row);
  return out;
}

Vec3 voxel_color(const VoxelSet& v, std::uint32_t row) { return {v.attributes(row, 0), v.attributes(row, 1), v.attributes(row, 2)}; }

void require_colors(const VoxelSet& v) {
  if (v.size() > 0 && (v.attributes.rows() != v.size() || v.attributes.cols() < 3))
    throw ShapeMismatchError("voxel set needs three color columns");
}

}  // namespace

double psnr(double mse, double peak_squared) {
  if (mse <= 0) return kInfinity;
  return -10.0 * std::log10(mse / peak_squared);
}

double psnr_transform_geometry(std::span<const std::vector<Vec3>> reference,
                               std::span<const std::vector<Vec3>> reconstruction) {
  require_same_frame_count(reference.size(), reconstruction.size());
  double acc = 0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto& a = reference[t];
    const auto& b = reconstruction[t];
    if (a.size() != b.size() || a.empty()) throw ShapeMismatchError("geometry frames differ in size");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += squared_distance(a[i], b[i]);
    acc += s / (3.0 * static_cast<double>(a.size()));
  }
  return psnr(acc / static_cast<double>(reference.size()), 1.0);
}

std::array<double, 3> psnr_transform_color(std::span<const Matrix> reference, std::span<const Matrix> reconstruction) {
  require_same_frame_count(reference.size(), reconstruction.size());
  std::array<double, 3> acc{};
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto& a = reference[t];
    const auto& b = reconstruction[t];
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() < 3 || a.rows() == 0)
      throw ShapeMismatchError("color frames differ in shape");
    for (int c = 0; c < 3; ++c) {
      double s = 0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += (a(i, c) - b(i, c)) * (a(i, c) - b(i, c));
      acc[c] += s / (kColorPeakSq * static_cast<double>(a.rows()));
    }
  }
  std::array<double, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = psnr(acc[c] / static_cast<double>(reference.size()), 1.0);
  return out;
}

DenseCloud dense_cloud(const TriangleCloudFrame& frame, std::uint32_t upsample_interp) {
  if (upsample_interp == 0) throw ParameterError("interpolation factor must be positive");
  const auto refined = geom::refine(frame.vertices, frame.faces, frame.upsample);
  const auto faces = geom::refined_faces(frame.faces.size(), frame.upsample);
  auto cloud = geom::refine_interpolate(refined, frame.colors, faces, upsample_interp);
  return {std::move(cloud.points), std::move(cloud.colors)};
}

Psnr psnr_triangle_cloud(std::span<const TriangleCloudFrame> reference,
                         std::span<const TriangleCloudFrame> reconstruction, std::uint32_t upsample_interp) {
  require_same_frame_count(reference.size(), reconstruction.size());
  double g = 0;
  std::array<double, 3> col{};
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto& a = reference[t];
    const auto& b = reconstruction[t];
    // Vertex order may differ (decoded frames are canonical); faces and
    // refined points correspond one to one.
    if (a.faces.size() != b.faces.size() || a.upsample != b.upsample || a.vertices.size() != b.vertices.size() ||
        a.colors.size() != b.colors.size())
      throw ShapeMismatchError("frames differ in faces or counts");
    const auto da = dense_cloud(a, upsample_interp);
    const auto db = dense_cloud(b, upsample_interp);
    const auto n = static_cast<double>(da.points.size());
    double sg = 0;
    std::array<double, 3> sc{};
    for (std::size_t i = 0; i < da.points.size(); ++i) {
      sg += squared_distance(da.points[i], db.points[i]);
      for (int c = 0; c < 3; ++c) sc[c] += (da.colors[i][c] - db.colors[i][c]) * (da.colors[i][c] - db.colors[i][c]);
    }
    g += sg / (3.0 * n);
    for (int c = 0; c < 3; ++c) col[c] += sc[c] / (kColorPeakSq * n);
  }
  const auto frames = static_cast<double>(reference.size());
  Psnr out;
  out.geometry = psnr(g / frames, 1.0);
  for (int c = 0; c < 3; ++c) out.color[c] = psnr(col[c] / frames, 1.0);
  return out;
}

VoxelSet voxelize_colored(std::span<const Vec3> points, std::span<const Vec3> colors, std::uint32_t depth) {
  if (points.size() != colors.size()) throw ShapeMismatchError("points and colors differ in count");
  const double top = std::nextafter(1.0, 0.0);
  std::vector<Vec3> clamped(points.begin(), points.end());
  for (auto& p : clamped)
    for (auto& x : p) x = std::clamp(x, 0.0, top);
  return std::move(geom::voxelize(clamped, Matrix::from_rows(colors), depth).voxel_set);
}

FaceImage project_face(const VoxelSet& voxels, CubeFace face) {
  require_colors(voxels);
  FaceImage img;
  img.size = 1u << voxels.depth;
  img.pixels.assign(std::size_t(img.size) * img.size, Vec3{kNeutralGray, kNeutralGray, kNeutralGray});
  for (const auto& [key, row] : sparse_projection(voxels, face)) img.pixels[key] = voxel_color(voxels, row);
  return img;
}

std::array<FaceImage, 6> project_to_faces(const VoxelSet& voxels) {
  std::array<FaceImage, 6> out;
  for (int f = 0; f < 6; ++f) out[f] = project_face(voxels, static_cast<CubeFace>(f));
  return out;
}

std::array<double, 3> projection_squared_error(const VoxelSet& reference, const VoxelSet& reconstruction) {
  if (reference.depth != reconstruction.depth) throw ShapeMismatchError("voxel sets differ in depth");
  require_colors(reference);
  require_colors(reconstruction);
  const Vec3 gray{kNeutralGray, kNeutralGray, kNeutralGray};
  std::array<double, 3> err{};
  auto add = [&](const Vec3& a, const Vec3& b) {
    for (int c = 0; c < 3; ++c) err[c] += (a[c] - b[c]) * (a[c] - b[c]);
  };
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  const std::uint32_t depth = reference.depth;
  // Pixels empty in both images are gray on both sides and contribute nothing.
  if (depth <= 12) {
    // Dense winner buffers; voxel rows are visited in order so ties cannot occur
    // (one voxel per depth along a pixel ray).
    const std::size_t side = std::size_t{1} << depth;
    std::vector<std::uint32_t> wa(side * side), wb(side * side);
    std::vector<std::int64_t> da(side * side), db(side * side);
    auto fill = [&](const VoxelSet& v, int face, std::vector<std::uint32_t>& win, std::vector<std::int64_t>& dep) {
      std::fill(win.begin(), win.end(), kNone);
      const int axis = face / 2;
      const bool positive = face % 2 == 1;
      const int ua = axis == 0 ? 1 : 0;
      const int va = axis == 2 ? 1 : 2;
      for (std::uint32_t i = 0; i < v.size(); ++i) {
        const auto p = geom::morton_decode(v.codes[i], depth);
        const std::size_t key = p[ua] * side + p[va];
        const std::int64_t d = positive ? -std::int64_t(p[axis]) : std::int64_t(p[axis]);
        if (win[key] == kNone || d < dep[key]) {
          win[key] = i;
          dep[key] = d;
        }
      }
    };
    for (int f = 0; f < 6; ++f) {
      fill(reference, f, wa, da);
      fill(reconstruction, f, wb, db);
      for (std::size_t k = 0; k < wa.size(); ++k) {
        if (wa[k] == kNone && wb[k] == kNone) continue;
        add(wa[k] == kNone ? gray : voxel_color(reference, wa[k]),
            wb[k] == kNone ? gray : voxel_color(reconstruction, wb[k]));
      }
    }
    return err;
  }
  for (int f = 0; f < 6; ++f) {
    const auto pa = sparse_projection(reference, static_cast<CubeFace>(f));
    const auto pb = sparse_projection(reconstruction, static_cast<CubeFace>(f));
    std::size_t i = 0, j = 0;
    while (i < pa.size() || j < pb.size()) {
      if (j == pb.size() || (i < pa.size() && pa[i].first < pb[j].first)) {
        add(voxel_color(reference, pa[i++].second), gray);
      } else if (i == pa.size() || pb[j].first < pa[i].first) {
        add(gray, voxel_color(reconstruction, pb[j++].second));
      } else {
        add(voxel_color(reference, pa[i++].second), voxel_color(reconstruction, pb[j++].second));
      }
    }
  }
  return err;
}

std::array<double, 3> projection_psnr(std::span<const VoxelSet> reference, std::span<const VoxelSet> reconstruction) {
  require_same_frame_count(reference.size(), reconstruction.size());
  std::array<double, 3> total{};
  double pixels = 0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto e = projection_squared_error(reference[t], reconstruction[t]);
    for (int c = 0; c < 3; ++c) total[c] += e[c];
    const double side = std::ldexp(1.0, static_cast<int>(reference[t].depth));
    pixels += 6.0 * side * side;
  }
  std::array<double, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = psnr(total[c] / pixels, kColorPeakSq);
  return out;
}

std::array<double, 3> projection_psnr(std::span<const TriangleCloudFrame> reference,
                                      std::span<const TriangleCloudFrame> reconstruction, std::uint32_t depth,
                                      std::uint32_t upsample_interp) {
  require_same_frame_count(reference.size(), reconstruction.size());
  std::array<double, 3> total{};
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto a = dense_cloud(reference[t], upsample_interp);
    const auto b = dense_cloud(reconstruction[t], upsample_interp);
    const auto e = projection_squared_error(voxelize_colored(a.points, a.colors, depth),
                                            voxelize_colored(b.points, b.colors, depth));
    for (int c = 0; c < 3; ++c) total[c] += e[c];
  }
  const double side = std::ldexp(1.0, static_cast<int>(depth));
  const double pixels = 6.0 * side * side * static_cast<double>(reference.size());
  std::array<double, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = psnr(total[c] / pixels, kColorPeakSq);
  return out;
}

std::vector<std::uint32_t> nearest_neighbors(const VoxelSet& query, const VoxelSet& target) {
  if (query.size() == 0 || target.size() == 0) throw EmptySetError("nearest neighbors of an empty set");
  if (query.depth != target.depth) throw ShapeMismatchError("voxel sets differ in depth");
  const auto q = lattice_points(query);
  const auto t = lattice_points(target);
  std::vector<std::uint32_t> out(q.size());
  if (t.size() <= 32) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (std::uint32_t j = 0; j < t.size(); ++j) {
        const auto d = lattice_d2(q[i], t[j]);
        if (d < best) {
          best = d;
          out[i] = j;
        }
      }
    }
    return out;
  }
  const Grid grid(target, t);
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = grid.nearest(query.codes[i], q[i]);
  return out;
}

double MatchingDistortion::geometry() const { return std::max(forward_geometry, backward_geometry); }

std::array<double, 3> MatchingDistortion::color() const {
  std::array<double, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = std::max(forward_color[c], backward_color[c]);
  return out;
}

MatchingDistortion matching_distortion(const VoxelSet& source, const VoxelSet& target) {
  if (source.size() == 0 || target.size() == 0) throw EmptySetError("matching distortion of an empty set");
  require_colors(source);
  require_colors(target);
  const auto ps = lattice_points(source);
  const auto pt = lattice_points(target);
  const double scale = std::ldexp(1.0, -2 * static_cast<int>(source.depth));
  auto one_way = [](const VoxelSet& from, const std::vector<Lattice>& pf, const VoxelSet& to,
                    const std::vector<Lattice>& pto, const std::vector<std::uint32_t>& nn, double sc, double& geo,
                    std::array<double, 3>& col) {
    std::uint64_t d2 = 0;
    std::array<double, 3> s{};
    for (std::size_t i = 0; i < nn.size(); ++i) {
      d2 += static_cast<std::uint64_t>(lattice_d2(pf[i], pto[nn[i]]));
      for (int c = 0; c < 3; ++c) {
        const double e = from.attributes(i, c) - to.attributes(nn[i], c);
        s[c] += e * e;
      }
    }
    const auto n = static_cast<double>(nn.size());
    geo = static_cast<double>(d2) * sc / n;
    for (int c = 0; c < 3; ++c) col[c] = s[c] / n;
  };
  MatchingDistortion out;
  one_way(source, ps, target, pt, nearest_neighbors(source, target), scale, out.forward_geometry, out.forward_color);
  one_way(target, pt, source, ps, nearest_neighbors(target, source), scale, out.backward_geometry,
          out.backward_color);
  return out;
}

Psnr matching_psnr(std::span<const MatchingDistortion> frames) {
  if (frames.empty()) throw ShapeMismatchError("empty sequence");
  double g = 0;
  std::array<double, 3> col{};
  for (const auto& f : frames) {
    g += f.geometry();
    const auto c = f.color();
    for (int k = 0; k < 3; ++k) col[k] += c[k];
  }
  const auto n = static_cast<double>(frames.size());
  Psnr out;
  out.geometry = psnr(g / n, 3.0);
  for (int k = 0; k < 3; ++k) out.color[k] = psnr(col[k] / n, kColorPeakSq);
  return out;
}

Psnr matching_psnr(std::span<const TriangleCloudFrame> reference, std::span<const TriangleCloudFrame> reconstruction,
                   std::uint32_t depth, std::uint32_t upsample_interp) {
  require_same_frame_count(reference.size(), reconstruction.size());
  std::vector<MatchingDistortion> per_frame;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const auto a = dense_cloud(reference[t], upsample_interp);
    const auto b = dense_cloud(reconstruction[t], upsample_interp);
    per_frame.push_back(matching_distortion(voxelize_colored(a.points, a.colors, depth),
                                            voxelize_colored(b.points, b.colors, depth)));
  }
  return matching_psnr(per_frame);
}

double rate_mbps(std::uint64_t bits, std::size_t frames) {
  if (frames == 0) throw ParameterError("rate needs at least one frame");
  return static_cast<double>(bits) / (1024.0 * 1024.0 * static_cast<double>(frames)) * kFramesPerSecond;
}

double rate_bpv(std::uint64_t bits, std::uint64_t total_voxels) {
  if (total_voxels == 0) throw ParameterError("rate needs at least one voxel");
  return static_cast<double>(bits) / static_cast<double>(total_voxels);
}

Rates rates(std::uint64_t bits, std::size_t frames, std::span<const std::size_t> voxel_counts) {
  std::uint64_t total = 0;
  for (auto v : voxel_counts) total += v;
  return {rate_mbps(bits, frames), rate_bpv(bits, total)};
}

}  // namespace tricloud::metrics
