#include "coefficient_coding.hpp"

#include <algorithm>

#include "tricloud/entropy.hpp"
#include "tricloud/errors.hpp"

namespace tricloud::coding {

PlaneEncodeResult encode_planes(detail::ByteWriter& out, const transform::RahtPlan& plan, const Matrix& attributes,
                                double step) {
  const auto block = transform::raht_forward(plan, attributes);
  const auto order = transform::serialize_order(block.weights);
  const std::size_t n = attributes.rows();
  Matrix dequantized(n, attributes.cols());
  PlaneEncodeResult res;
  for (std::size_t c = 0; c < attributes.cols(); ++c) {
    std::vector<double> ordered(n);
    for (std::size_t k = 0; k < n; ++k) ordered[k] = block.coefficients(order[k], c);
    auto symbols = transform::quantize_indices(ordered, step);
    const auto values = transform::dequantize_indices(symbols, step);
    for (std::size_t k = 0; k < n; ++k) dequantized(order[k], c) = values[k];
    // An all-zero plane is sent as an empty section. RLGR never emits zero
    // bytes for a nonempty plane, so the two cases cannot be confused.
    const bool zero = std::all_of(symbols.begin(), symbols.end(), [](std::int64_t s) { return s == 0; });
    out.u32(static_cast<std::uint32_t>(n));
    out.section(zero ? std::vector<std::uint8_t>{} : entropy::rlgr_encode(symbols));
    res.symbols.push_back(std::move(symbols));
  }
  res.reconstruction = transform::raht_inverse(plan, dequantized);
  return res;
}

Matrix decode_planes(detail::ByteReader& in, const transform::RahtPlan& plan, std::size_t cols, double step) {
  const auto weights = transform::raht_weights(plan);
  const auto order = transform::serialize_order(weights);
  const std::size_t n = plan.point_count;
  Matrix dequantized(n, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto count = in.u32();
    if (count != n) throw CorruptStreamError("coefficient plane count does not match voxel count");
    const auto bytes = in.section();
    const auto symbols = bytes.empty() ? std::vector<std::int64_t>(count, 0) : entropy::rlgr_decode(bytes, count);
    const auto values = transform::dequantize_indices(symbols, step);
    for (std::size_t k = 0; k < n; ++k) dequantized(order[k], c) = values[k];
  }
  return transform::raht_inverse(plan, dequantized);
}

}  // namespace tricloud::coding
