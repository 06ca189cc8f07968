#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tricloud/transform.hpp"
#include "tricloud/types.hpp"

// Group-of-frames codec. The reference frame carries the geometry (octree of
// quantized vertices, duplicate-index runs, faces) and intra-coded colors;
// every predicted frame carries RAHT-coded motion and color residuals
// against the previous reconstruction, voxelized with respect to the
// reference frame. Byte layout: docs/bitstream.md.
namespace tricloud::codec {

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::uint8_t kGofCoderVersion = 1;

struct GofHeader {
  std::uint8_t coder_version = kGofCoderVersion;
  std::uint32_t depth = 0;
  std::uint32_t upsample = 0;
  std::uint32_t frame_count = 0;
  std::uint32_t vertex_count = 0;
  std::uint32_t face_count = 0;
  double step_motion = 0;
  double step_color_intra = 0;
  double step_color_inter = 0;

  CodecParams params() const;
  static constexpr std::size_t kSerializedSize = 1 + 1 + 4 * 4 + 3 * 8;
};

// Payload of one frame. Each member is three planes of
// (u32 symbol count, u32 byte length, RLGR bytes).
struct EncodedFrame {
  std::vector<std::uint8_t> motion;  // empty for the reference frame
  std::vector<std::uint8_t> color;
};

struct SectionSizes {
  std::size_t header = 0;
  std::vector<std::size_t> geometry;  // per frame, framing included
  std::vector<std::size_t> color;

  std::size_t total() const;
  std::size_t geometry_total() const;
  std::size_t color_total() const;
};

struct EncodedGof {
  GofHeader header;
  std::vector<std::uint8_t> octree;      // deflated occupancy bytes of the vertex voxels
  std::vector<std::uint8_t> index_runs;  // deflated duplicate-index runs
  std::vector<std::uint8_t> faces;       // deflated u32 face indices
  std::vector<EncodedFrame> frames;

  std::vector<std::uint8_t> serialize() const;
  static EncodedGof parse(std::span<const std::uint8_t> bytes);
  SectionSizes sizes() const;
};

// Geometry shared by every frame of a GOF, identical on both sides.
struct ReferenceState {
  std::uint32_t depth = 0;
  std::uint32_t upsample = 0;
  std::vector<Face> faces;
  std::vector<Vec3> quantized_vertices;     // vertices snapped to voxel centers
  VoxelSet vertex_voxels;                   // occupied by quantized vertices
  std::vector<Vec3> vertex_voxel_centers;
  std::vector<std::uint32_t> vertex_index;  // vertex -> vertex voxel
  std::vector<Vec3> refined_vertices;       // refine(quantized_vertices)
  VoxelSet refined_voxels;
  std::vector<std::uint32_t> refined_index;  // refined vertex -> refined voxel
  transform::RahtPlan vertex_plan;
  transform::RahtPlan refined_plan;
};

// Closed-loop prediction state: reconstructed per-voxel positions (unit
// cube coordinates) and per-voxel colors of the last frame.
struct FrameBuffer {
  std::vector<Vec3> vertices;
  Matrix colors;

  friend bool operator==(const FrameBuffer&, const FrameBuffer&) = default;
};

// Voxel-domain input and reconstruction of one frame, used for the
// transform-coding distortion.
struct FrameTrace {
  std::vector<Vec3> geometry_input;
  std::vector<Vec3> geometry_recon;
  Matrix color_input;
  Matrix color_recon;
  std::vector<std::vector<std::int64_t>> motion_symbols;  // per axis, empty for the reference
  std::vector<std::vector<std::int64_t>> color_symbols;   // per component
};

// Quantizes a vertex to the center of the voxel containing it.
Vec3 quantize_vertex(const Vec3& v, std::uint32_t depth);

/// Permutation putting the reference frame's vertices in Morton order of
/// their quantized positions (stable). perm[k] is the old index of new vertex k.
std::vector<std::uint32_t> canonical_vertex_order(const TriangleCloudFrame& reference, std::uint32_t depth);

/// Applies canonical_vertex_order to all frames and remaps the faces. The
/// refined-vertex order, and hence the colors, are unchanged.
GroupOfFrames canonicalize(const GroupOfFrames& gof, std::uint32_t depth);

class GofEncoder {
 public:
  explicit GofEncoder(const CodecParams& params);

  // The frame must be in canonical vertex order (see canonicalize()).
  void encode_reference(const TriangleCloudFrame& frame, EncodedGof& out);
  EncodedFrame encode_predicted(const TriangleCloudFrame& frame);

  const CodecParams& params() const { return params_; }
  const ReferenceState& reference() const { return ref_; }
  const FrameBuffer& buffer() const { return buffer_; }
  const FrameTrace& last_trace() const { return trace_; }

 private:
  CodecParams params_;
  ReferenceState ref_;
  FrameBuffer buffer_;
  FrameTrace trace_;
  bool have_reference_ = false;
};

class GofDecoder {
 public:
  explicit GofDecoder(const GofHeader& header);

  TriangleCloudFrame decode_reference(const EncodedGof& gof);
  TriangleCloudFrame decode_predicted(const EncodedFrame& frame);

  const ReferenceState& reference() const { return ref_; }
  const FrameBuffer& buffer() const { return buffer_; }

 private:
  GofHeader header_;
  ReferenceState ref_;
  FrameBuffer buffer_;
  bool have_reference_ = false;
};

struct GofEncodeResult {
  EncodedGof encoded;
  std::vector<FrameTrace> traces;       // filled when requested
  std::vector<FrameBuffer> buffers;     // encoder buffer after every frame, when requested
  std::vector<std::uint32_t> vertex_order;  // canonical_vertex_order of the input
};

struct EncodeOptions {
  bool keep_traces = false;
  bool keep_buffers = false;
};

GofEncodeResult encode_gof(const GroupOfFrames& gof, const CodecParams& params, const EncodeOptions& options = {});

struct GofDecodeResult {
  GroupOfFrames frames;
  std::vector<FrameBuffer> buffers;  // decoder buffer after every frame
};
GofDecodeResult decode_gof_with_state(const EncodedGof& encoded);
GroupOfFrames decode_gof(const EncodedGof& encoded);

// Voxelized system inputs of every frame (per-voxel mean positions and
// colors against the quantized reference), computed from the original GOF
// alone. Equal to the encoder's FrameTrace inputs.
struct VoxelizedFrame {
  std::vector<Vec3> geometry;
  Matrix color;
};
std::vector<VoxelizedFrame> voxelized_inputs(const GroupOfFrames& gof, std::uint32_t depth);

// Splits every GOF into single-frame GOFs so each frame is intra coded.
std::vector<GroupOfFrames> all_intra(std::span<const GroupOfFrames> gofs);

/// Independent GOFs, optionally encoded in parallel over `jobs` threads.
std::vector<GofEncodeResult> encode_gofs(std::span<const GroupOfFrames> gofs, const CodecParams& params,
                                         const EncodeOptions& options, unsigned jobs = 1);
std::vector<GofDecodeResult> decode_gofs(std::span<const EncodedGof> encoded, unsigned jobs = 1);
std::vector<EncodedGof> encode_sequence(std::span<const GroupOfFrames> gofs, const CodecParams& params,
                                        unsigned jobs = 1);
std::vector<GroupOfFrames> decode_sequence(std::span<const EncodedGof> encoded, unsigned jobs = 1);

// TCB1 container: magic, u16 version, u32 GOF count, length-prefixed records.
std::vector<std::uint8_t> write_container(std::span<const EncodedGof> gofs);
std::vector<EncodedGof> read_container(std::span<const std::uint8_t> bytes);
inline constexpr std::size_t kContainerHeaderSize = 4 + 2 + 4;
inline constexpr std::size_t kRecordPrefixSize = 4;

}  // namespace tricloud::codec
