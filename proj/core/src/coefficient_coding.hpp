#pragma once

// Transform coding of attribute planes: RAHT, midstep quantization, weight
// ordering and one RLGR stream per column. Shared by the GOF codec and the
// point-cloud baseline.

#include <cstdint>
#include <vector>

#include "byte_io.hpp"
#include "tricloud/transform.hpp"
#include "tricloud/types.hpp"

namespace tricloud::coding {

struct PlaneEncodeResult {
  Matrix reconstruction;                         // IRAHT of the dequantized coefficients
  std::vector<std::vector<std::int64_t>> symbols;  // per column, in serialization order
};

// Each plane is written as u32 symbol count, u32 byte length, RLGR bytes.
PlaneEncodeResult encode_planes(detail::ByteWriter& out, const transform::RahtPlan& plan, const Matrix& attributes,
                                double step);

Matrix decode_planes(detail::ByteReader& in, const transform::RahtPlan& plan, std::size_t cols, double step);

}  // namespace tricloud::coding
