#include "tricloud/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tricloud/errors.hpp"
#include "tricloud/geom.hpp"

namespace tricloud::datagen {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPeriodFrames = 30.0;
constexpr double kMaxAmplitude = 0.15;  // base shapes sit inside [0.2, 0.8]

Mesh wave_plane(std::uint32_t target_faces) {
  // a x b grid of quads, two triangles each.
  std::uint32_t best_a = 1, best_b = 1;
  long best_err = -1;
  for (std::uint32_t b = 1; 2ull * b * b <= 2ull * target_faces + 2 * b; ++b) {
    const auto a = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(target_faces / (2.0 * b))));
    const long err = std::labs(2L * a * b - static_cast<long>(target_faces));
    if (best_err < 0 || err < best_err || (err == best_err && std::abs(long(a) - long(b)) < std::abs(long(best_a) - long(best_b)))) {
      best_err = err;
      best_a = a;
      best_b = b;
    }
  }
  Mesh m;
  for (std::uint32_t i = 0; i <= best_a; ++i)
    for (std::uint32_t j = 0; j <= best_b; ++j) {
      const double x = 0.2 + 0.6 * i / best_a;
      const double y = 0.2 + 0.6 * j / best_b;
      m.vertices.push_back({x, y, 0.5 + 0.04 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y)});
    }
  auto id = [&](std::uint32_t i, std::uint32_t j) { return i * (best_b + 1) + j; };
  for (std::uint32_t i = 0; i < best_a; ++i)
    for (std::uint32_t j = 0; j < best_b; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      m.faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

void append(Mesh& dst, const Mesh& src) {
  const auto offset = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  for (auto f : src.faces) dst.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
}

struct Field {
  std::array<double, 3> phase;
  std::array<double, 3> freq;
  double time_phase;
};

Vec3 displacement(const Field& f, const Vec3& p, double amplitude, std::uint32_t t) {
  const double s = std::sin(kTwoPi * t / kPeriodFrames + f.time_phase) - std::sin(f.time_phase);
  return {amplitude * s * std::sin(kTwoPi * f.freq[0] * p[1] + f.phase[0]),
          amplitude * s * std::sin(kTwoPi * f.freq[1] * p[2] + f.phase[1]),
          amplitude * s * std::sin(kTwoPi * f.freq[2] * p[0] + f.phase[2])};
}

Vec3 texture(const Vec3& p, const std::array<double, 3>& offset) {
  const auto cell = [&](int k) { return static_cast<long>(std::floor(p[k] * 8.0 + offset[k])); };
  const double checker = ((cell(0) + cell(1) + cell(2)) & 1) ? 1.0 : 0.0;
  const double y = 40.0 + 150.0 * std::clamp(p[2], 0.0, 1.0) + 25.0 * checker;
  const double u = 128.0 + 80.0 * (p[0] - 0.5);
  const double v = 128.0 + 80.0 * (p[1] - 0.5);
  return {std::clamp(std::round(y), 0.0, 255.0), std::clamp(std::round(u), 0.0, 255.0),
          std::clamp(std::round(v), 0.0, 255.0)};
}

// Rodrigues rotation about the cube center, then a translation.
Vec3 rotate(const Vec3& p, const Vec3& axis, double angle, const Vec3& shift) {
  const Vec3 q{p[0] - 0.5, p[1] - 0.5, p[2] - 0.5};
  const double c = std::cos(angle), s = std::sin(angle);
  const double dot = axis[0] * q[0] + axis[1] * q[1] + axis[2] * q[2];
  const Vec3 cross{axis[1] * q[2] - axis[2] * q[1], axis[2] * q[0] - axis[0] * q[2], axis[0] * q[1] - axis[1] * q[0]};
  Vec3 out;
  for (int k = 0; k < 3; ++k) out[k] = 0.5 + shift[k] + q[k] * c + cross[k] * s + axis[k] * dot * (1.0 - c);
  return out;
}

}  // namespace

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Shape parse_shape(std::string_view name) {
  if (name == "sphere") return Shape::sphere;
  if (name == "wave-plane") return Shape::wave_plane;
  if (name == "two-blobs") return Shape::two_blobs;
  throw ParameterError("unknown shape '" + std::string(name) + "' (sphere, wave-plane, two-blobs)");
}

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::sphere: return "sphere";
    case Shape::wave_plane: return "wave-plane";
    case Shape::two_blobs: return "two-blobs";
  }
  return "?";
}

void SequenceParams::validate() const {
  if (frames < 1) throw ParameterError("frame count must be positive");
  if (target_faces < 1) throw ParameterError("face count must be positive");
  if (upsample < 1) throw ParameterError("upsample factor must be positive");
  if (!(amplitude >= 0.0) || amplitude > kMaxAmplitude) throw ParameterError("amplitude must be in [0, 0.15]");
  if (depth < 1 || depth > 21) throw ParameterError("depth must be in [1, 21]");
}

Mesh uv_sphere(std::uint32_t slices, std::uint32_t rings, const Vec3& center, double radius) {
  if (slices < 3 || rings < 2) throw ParameterError("sphere needs >= 3 slices and >= 2 rings");
  Mesh m;
  auto at = [&](double theta, double phi) {
    return Vec3{center[0] + radius * std::sin(theta) * std::cos(phi), center[1] + radius * std::sin(theta) * std::sin(phi),
                center[2] + radius * std::cos(theta)};
  };
  m.vertices.push_back(at(0, 0));
  for (std::uint32_t r = 1; r < rings; ++r)
    for (std::uint32_t s = 0; s < slices; ++s)
      m.vertices.push_back(at(std::numbers::pi * r / rings, kTwoPi * s / slices));
  m.vertices.push_back(at(std::numbers::pi, 0));
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [&](std::uint32_t r, std::uint32_t s) { return 1 + (r - 1) * slices + s % slices; };
  for (std::uint32_t s = 0; s < slices; ++s) m.faces.push_back({0, ring(1, s), ring(1, s + 1)});
  for (std::uint32_t r = 1; r + 1 < rings; ++r)
    for (std::uint32_t s = 0; s < slices; ++s) {
      m.faces.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      m.faces.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  for (std::uint32_t s = 0; s < slices; ++s) m.faces.push_back({ring(rings - 1, s), south, ring(rings - 1, s + 1)});
  return m;
}

std::pair<std::uint32_t, std::uint32_t> sphere_resolution(std::uint32_t target_faces) {
  // Prefer slices ~ 1.6 x (rings - 1) among the closest face counts.
  std::uint32_t best_s = 3, best_r = 2;
  long best_err = -1;
  double best_aspect = 0;
  for (std::uint32_t q = 1; 2ull * 3 * q <= std::max<std::uint64_t>(6, 2ull * target_faces); ++q) {
    const auto s = std::max<std::uint32_t>(3, static_cast<std::uint32_t>(std::lround(target_faces / (2.0 * q))));
    const long err = std::labs(2L * s * q - static_cast<long>(target_faces));
    const double aspect = std::abs(static_cast<double>(s) / q - 1.6);
    if (best_err < 0 || err < best_err || (err == best_err && aspect < best_aspect)) {
      best_err = err;
      best_aspect = aspect;
      best_s = s;
      best_r = q + 1;
    }
  }
  return {best_s, best_r};
}

Mesh base_mesh(Shape shape, std::uint32_t target_faces) {
  switch (shape) {
    case Shape::sphere: {
      const auto [s, r] = sphere_resolution(target_faces);
      return uv_sphere(s, r, {0.5, 0.5, 0.5}, 0.3);
    }
    case Shape::wave_plane:
      return wave_plane(target_faces);
    case Shape::two_blobs: {
      const auto [s, r] = sphere_resolution(std::max<std::uint32_t>(1, target_faces / 2));
      Mesh m = uv_sphere(s, r, {0.33, 0.5, 0.5}, 0.13);
      append(m, uv_sphere(s, r, {0.67, 0.5, 0.5}, 0.13));
      return m;
    }
  }
  throw ParameterError("unknown shape");
}

std::vector<GroupOfFrames> gen_sequence(const SequenceParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  auto uni = [&] { return uniform01(rng()); };
  Mesh base = base_mesh(params.shape, params.target_faces);
  // A small seeded rigid motion keeps vertices off the voxel grid lines the
  // tessellation would otherwise hit exactly (e.g. x = 0.5 on the sphere).
  {
    Vec3 axis{uni() - 0.5, uni() - 0.5, uni() - 0.5};
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]) + 1e-12;
    for (auto& a : axis) a /= len;
    const double angle = 0.2 * (2.0 * uni() - 1.0);
    const Vec3 shift{0.02 * (2.0 * uni() - 1.0), 0.02 * (2.0 * uni() - 1.0), 0.02 * (2.0 * uni() - 1.0)};
    for (auto& v : base.vertices) v = rotate(v, axis, angle, shift);
  }

  Field field;
  for (int k = 0; k < 3; ++k) field.phase[k] = kTwoPi * uni();
  for (int k = 0; k < 3; ++k) field.freq[k] = 0.75 + 0.75 * uni();
  field.time_phase = kTwoPi * uni();
  const std::array<double, 3> tex_offset{uni(), uni(), uni()};

  // Colors follow the surface: sampled once on the undeformed refined mesh.
  std::vector<Vec3> colors;
  if (params.constant_color) {
    colors.assign(base.faces.size() * refined_per_face(params.upsample), Vec3{110.0, 120.0, 140.0});
  } else {
    for (const auto& p : geom::refine(base.vertices, base.faces, params.upsample)) colors.push_back(texture(p, tex_offset));
  }

  const double margin = std::ldexp(1.0, -static_cast<int>(params.depth) - 2);
  const std::uint32_t gof_size = params.gof_size == 0 ? params.frames : params.gof_size;
  std::vector<GroupOfFrames> out;
  for (std::uint32_t t = 0; t < params.frames; ++t) {
    if (t % gof_size == 0) out.emplace_back();
    TriangleCloudFrame f;
    f.upsample = params.upsample;
    f.faces = base.faces;
    f.colors = colors;
    f.vertices.reserve(base.vertices.size());
    for (const auto& p : base.vertices) {
      const Vec3 d = displacement(field, p, params.amplitude, t);
      Vec3 q;
      // Stored as f32 in TCF1, so round here to keep files lossless.
      for (int k = 0; k < 3; ++k) q[k] = std::clamp(double(float(p[k] + d[k])), margin, 1.0 - margin);
      f.vertices.push_back(q);
    }
    out.back().frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace tricloud::datagen
