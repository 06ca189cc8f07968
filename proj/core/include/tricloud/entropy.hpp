#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Entropy coders: adaptive run-length Golomb-Rice for quantized transform
// coefficients, alternating run lengths for duplicate-index maps, and zlib
// framed DEFLATE for byte sections. Bit layouts are in docs/bitstream.md.
namespace tricloud::entropy {

// Adaptation constants of the coder, frozen with kRlgrVersion.
struct RlgrConstants {
  static constexpr int kScaleBits = 3;    // parameters are kept scaled by 2^3
  static constexpr int kMaxScaled = 80;   // k, kr <= 10
  static constexpr int kRunUp = 4;        // after a full zero run
  static constexpr int kRunDown = 6;      // after a run terminated by a nonzero
  static constexpr int kGrZeroUp = 3;     // Golomb-Rice mode, symbol == 0
  static constexpr int kGrNonzeroDown = 3;
  static constexpr int kEscapeUnary = 32; // unary prefix length that signals an escape
};
inline constexpr std::uint8_t kRlgrVersion = 1;

// Largest magnitude accepted by the coder.
inline constexpr std::int64_t kMaxSymbolMagnitude = (std::int64_t{1} << 62) - 1;

/// Encodes signed integers. The payload carries no count; callers store it.
std::vector<std::uint8_t> rlgr_encode(std::span<const std::int64_t> symbols);

/// Decodes exactly `count` symbols. Throws CorruptStreamError on premature
/// end, an impossible codeword, or bits left over after `count` symbols.
std::vector<std::int64_t> rlgr_decode(std::span<const std::uint8_t> bytes, std::size_t count);

/// Run lengths of a duplicate-index map. A virtual -1 precedes the map, so
/// the stream starts with the unit-run that contains the first element; runs
/// then alternate unit, zero, unit, ... and always end with a zero run (which
/// may be 0).
std::vector<std::uint64_t> index_runs(std::span<const std::uint32_t> index_map);
std::vector<std::uint32_t> index_map_from_runs(std::span<const std::uint64_t> runs);

/// LEB128 varints of the run lengths, DEFLATE-compressed.
std::vector<std::uint8_t> index_runs_encode(std::span<const std::uint32_t> index_map);
std::vector<std::uint32_t> index_runs_decode(std::span<const std::uint8_t> bytes);

/// zlib stream (RFC 1950) around DEFLATE.
std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> data);

}  // namespace tricloud::entropy
