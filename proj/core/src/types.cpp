#include "tricloud/types.hpp"

#include <algorithm>
#include <string>

#include "tricloud/errors.hpp"

namespace tricloud {

Matrix Matrix::from_rows(std::span<const Vec3> rows) {
  Matrix m(rows.size(), 3);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = rows[r][c];
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw ShapeMismatchError("column length does not match row count");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

std::vector<Vec3> Matrix::to_vec3_rows() const {
  if (cols_ != 3) throw ShapeMismatchError("expected a 3-column matrix");
  std::vector<Vec3> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)};
  return out;
}

void CodecParams::validate() const {
  if (depth < 1 || depth > 21) throw ParameterError("octree depth must be in [1, 21]");
  if (upsample < 1) throw ParameterError("upsample factor must be positive");
  if (!(step_motion > 0) || !(step_color_intra > 0) || !(step_color_inter > 0))
    throw ParameterError("quantization stepsizes must be positive");
}

void validate_frame(const TriangleCloudFrame& frame) {
  if (frame.upsample < 1) throw ConsistencyError("upsample factor must be positive");
  for (std::size_t i = 0; i < frame.vertices.size(); ++i) {
    for (double c : frame.vertices[i]) {
      if (!(c >= 0.0 && c < 1.0))
        throw ConsistencyError("coordinate out of [0,1) at vertex " + std::to_string(i));
    }
  }
  const auto np = frame.vertices.size();
  for (std::size_t f = 0; f < frame.faces.size(); ++f) {
    for (auto idx : frame.faces[f]) {
      if (idx >= np) throw ConsistencyError("face index out of range at face " + std::to_string(f));
    }
  }
  if (frame.colors.size() != frame.expected_color_count()) {
    throw ConsistencyError("color-count mismatch: expected " + std::to_string(frame.expected_color_count()) +
                           ", got " + std::to_string(frame.colors.size()));
  }
}

const GroupOfFrames& validate_gof(const GroupOfFrames& gof) {
  if (gof.frames.empty()) throw ConsistencyError("group of frames is empty");
  const auto& ref = gof.frames.front();
  for (std::size_t t = 0; t < gof.frames.size(); ++t) {
    const auto& f = gof.frames[t];
    if (t > 0) {
      if (f.faces != ref.faces) throw ConsistencyError("face mismatch in frame " + std::to_string(t + 1));
      if (f.vertices.size() != ref.vertices.size())
        throw ConsistencyError("vertex-count mismatch in frame " + std::to_string(t + 1));
      if (f.upsample != ref.upsample)
        throw ConsistencyError("upsample mismatch in frame " + std::to_string(t + 1));
    }
    validate_frame(f);
  }
  return gof;
}

// BT.601 full range (JPEG/JFIF matrix).
Vec3 rgb_to_yuv(const Vec3& rgb) {
  const double r = rgb[0], g = rgb[1], b = rgb[2];
  return {0.299 * r + 0.587 * g + 0.114 * b,
          128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b,
          128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b};
}

Vec3 yuv_to_rgb(const Vec3& yuv) {
  const double y = yuv[0], u = yuv[1] - 128.0, v = yuv[2] - 128.0;
  return {y + 1.402 * v, y - 0.344136 * u - 0.714136 * v, y + 1.772 * u};
}

}  // namespace tricloud
