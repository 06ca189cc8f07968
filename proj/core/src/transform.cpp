#include "tricloud/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tricloud/errors.hpp"

namespace tricloud::transform {

RahtPlan raht_plan(std::span<const MortonCode> codes, std::uint32_t depth) {
  if (depth < 1 || depth > 21) throw ParameterError("RAHT depth must be in [1, 21]");
  for (std::size_t i = 1; i < codes.size(); ++i)
    if (codes[i] <= codes[i - 1]) throw ParameterError("RAHT requires strictly increasing Morton codes");

  RahtPlan plan;
  plan.depth = depth;
  plan.point_count = codes.size();
  const std::uint32_t n = static_cast<std::uint32_t>(codes.size());
  const std::uint32_t levels = 3 * depth;
  const MortonCode all_bits = (MortonCode{1} << levels) - 1;
  plan.levels.resize(levels);

  std::vector<std::uint32_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0u);
  for (std::uint32_t l = 1; l <= levels; ++l) {
    auto& lev = plan.levels[l - 1];
    if (l > 1) {
      const auto& prev = plan.levels[l - 2];
      indices.clear();
      for (std::size_t k = 0; k < prev.indices.size(); ++k)
        if (k == 0 || !prev.left_sibling[k - 1]) indices.push_back(prev.indices[k]);
    }
    lev.indices = indices;
    lev.weights.resize(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k)
      lev.weights[k] = (k + 1 < indices.size() ? indices[k + 1] : n) - indices[k];
    const MortonCode mask = all_bits & ~((MortonCode{1} << l) - 1);
    lev.left_sibling.resize(indices.empty() ? 0 : indices.size() - 1);
    for (std::size_t k = 0; k + 1 < indices.size(); ++k)
      lev.left_sibling[k] = ((codes[indices[k]] ^ codes[indices[k + 1]]) & mask) == 0 ? 1 : 0;
  }
  return plan;
}

namespace {

// Visits every butterfly of level l: (left row, right row, left weight, right weight).
template <typename Fn>
void for_each_pair(const RahtLevel& lev, Fn&& fn) {
  for (std::size_t k = 0; k < lev.left_sibling.size(); ++k)
    if (lev.left_sibling[k]) fn(lev.indices[k], lev.indices[k + 1], lev.weights[k], lev.weights[k + 1]);
}

std::uint32_t transformed_levels(const RahtPlan& plan) { return 3 * plan.depth - 1; }

}  // namespace

CoefficientBlock raht_forward(const RahtPlan& plan, const Matrix& attributes) {
  if (attributes.rows() != plan.point_count) throw ShapeMismatchError("attribute rows must match voxel count");
  CoefficientBlock out{attributes, std::vector<std::uint32_t>(plan.point_count, 1)};
  auto& ta = out.coefficients;
  auto& w = out.weights;
  const std::size_t cols = ta.cols();
  for (std::uint32_t l = 1; l <= transformed_levels(plan); ++l) {
    for_each_pair(plan.levels[l - 1], [&](std::uint32_t i0, std::uint32_t i1, std::uint32_t w0, std::uint32_t w1) {
      const double sum = static_cast<double>(w0) + w1;
      const double a = std::sqrt(w0 / sum);
      const double b = std::sqrt(w1 / sum);
      for (std::size_t c = 0; c < cols; ++c) {
        const double x0 = ta(i0, c);
        const double x1 = ta(i1, c);
        ta(i0, c) = a * x0 + b * x1;
        ta(i1, c) = -b * x0 + a * x1;
      }
      w[i0] += w[i1];
      w[i1] = w[i0];
    });
  }
  return out;
}

std::vector<std::uint32_t> raht_weights(const RahtPlan& plan) {
  std::vector<std::uint32_t> w(plan.point_count, 1);
  for (std::uint32_t l = 1; l <= transformed_levels(plan); ++l) {
    for_each_pair(plan.levels[l - 1], [&](std::uint32_t i0, std::uint32_t i1, std::uint32_t, std::uint32_t) {
      w[i0] += w[i1];
      w[i1] = w[i0];
    });
  }
  return w;
}

Matrix raht_inverse(const RahtPlan& plan, const Matrix& coefficients) {
  if (coefficients.rows() != plan.point_count) throw ShapeMismatchError("coefficient rows must match voxel count");
  Matrix a = coefficients;
  const std::size_t cols = a.cols();
  for (std::uint32_t l = transformed_levels(plan); l >= 1; --l) {
    for_each_pair(plan.levels[l - 1], [&](std::uint32_t i0, std::uint32_t i1, std::uint32_t w0, std::uint32_t w1) {
      const double sum = static_cast<double>(w0) + w1;
      const double ca = std::sqrt(w0 / sum);
      const double cb = std::sqrt(w1 / sum);
      for (std::size_t c = 0; c < cols; ++c) {
        const double x0 = a(i0, c);
        const double x1 = a(i1, c);
        a(i0, c) = ca * x0 - cb * x1;
        a(i1, c) = cb * x0 + ca * x1;
      }
    });
  }
  return a;
}

double round_half_away(double x) { return std::round(x); }

double quantize(double value, double step, QuantizerMode mode) {
  if (!(step > 0)) throw ParameterError("quantizer step must be positive");
  if (mode == QuantizerMode::midstep) return round_half_away(value / step) * step;
  return (round_half_away(value / step - 0.5) + 0.5) * step;
}

Matrix quantize(const Matrix& values, double step, QuantizerMode mode) {
  Matrix out = values;
  for (double& v : out.data()) v = quantize(v, step, mode);
  return out;
}

std::vector<std::int64_t> quantize_indices(std::span<const double> values, double step) {
  if (!(step > 0)) throw ParameterError("quantizer step must be positive");
  std::vector<std::int64_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double q = round_half_away(values[i] / step);
    if (!(std::fabs(q) < 4.0e18)) throw RangeError("quantization index out of range");
    out[i] = static_cast<std::int64_t>(q);
  }
  return out;
}

std::vector<double> dequantize_indices(std::span<const std::int64_t> indices, double step) {
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) out[i] = static_cast<double>(indices[i]) * step;
  return out;
}

std::vector<std::uint32_t> serialize_order(std::span<const std::uint32_t> weights) {
  std::vector<std::uint32_t> perm(weights.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::stable_sort(perm.begin(), perm.end(), [&](auto a, auto b) { return weights[a] > weights[b]; });
  return perm;
}

}  // namespace tricloud::transform
