#include "tricloud/codec.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "byte_io.hpp"
#include "coefficient_coding.hpp"
#include "tricloud/entropy.hpp"
#include "tricloud/errors.hpp"
#include "tricloud/geom.hpp"
#include "tricloud/octree.hpp"

namespace tricloud::codec {
namespace {

constexpr std::string_view kContainerMagic = "TCB1";

double voxel_size(std::uint32_t depth) { return std::ldexp(1.0, -static_cast<int>(depth)); }

std::vector<std::uint8_t> face_bytes(std::span<const Face> faces) {
  detail::ByteWriter w;
  for (const auto& f : faces)
    for (auto idx : f) w.u32(idx);
  return entropy::deflate_bytes(w.take());
}

std::vector<Face> parse_faces(std::span<const std::uint8_t> bytes, std::uint32_t face_count,
                              std::uint32_t vertex_count) {
  const auto raw = entropy::inflate_bytes(bytes);
  if (raw.size() != static_cast<std::size_t>(face_count) * 12) throw CorruptStreamError("face section has wrong size");
  detail::ByteReader r(raw);
  std::vector<Face> faces(face_count);
  for (auto& f : faces)
    for (auto& idx : f) {
      idx = r.u32();
      if (idx >= vertex_count) throw CorruptStreamError("face index out of range");
    }
  return faces;
}

template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const std::uint32_t> index) {
  std::vector<T> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) out[i] = values[index[i]];
  return out;
}

std::vector<Vec3> gather_rows(const Matrix& m, std::span<const std::uint32_t> index) {
  std::vector<Vec3> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) out[i] = {m(index[i], 0), m(index[i], 1), m(index[i], 2)};
  return out;
}

// Refinement and voxelization of the quantized reference vertices; run
// identically by encoder and decoder.
void derive_refined(ReferenceState& ref) {
  ref.refined_vertices = geom::refine(ref.quantized_vertices, ref.faces, ref.upsample);
  auto vox = geom::voxelize(ref.refined_vertices, ref.depth);
  ref.refined_voxels = std::move(vox.voxel_set);
  ref.refined_index = std::move(vox.index_map);
  ref.refined_plan = transform::raht_plan(ref.refined_voxels.codes, ref.depth);
}

}  // namespace

CodecParams GofHeader::params() const {
  return {depth, upsample, step_motion, step_color_intra, step_color_inter};
}

std::size_t SectionSizes::geometry_total() const {
  return std::accumulate(geometry.begin(), geometry.end(), std::size_t{0});
}
std::size_t SectionSizes::color_total() const { return std::accumulate(color.begin(), color.end(), std::size_t{0}); }
std::size_t SectionSizes::total() const { return header + geometry_total() + color_total(); }

std::vector<std::uint8_t> EncodedGof::serialize() const {
  detail::ByteWriter w;
  w.u8(header.coder_version);
  w.u8(static_cast<std::uint8_t>(header.depth));
  w.u32(header.upsample);
  w.u32(header.frame_count);
  w.u32(header.vertex_count);
  w.u32(header.face_count);
  w.f64(header.step_motion);
  w.f64(header.step_color_intra);
  w.f64(header.step_color_inter);
  w.section(octree);
  w.section(index_runs);
  w.section(faces);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (t > 0) w.section(frames[t].motion);
    w.section(frames[t].color);
  }
  return w.take();
}

EncodedGof EncodedGof::parse(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  EncodedGof g;
  auto& h = g.header;
  h.coder_version = r.u8();
  if (h.coder_version != kGofCoderVersion)
    throw VersionError("unsupported GOF coder version " + std::to_string(h.coder_version));
  h.depth = r.u8();
  h.upsample = r.u32();
  h.frame_count = r.u32();
  h.vertex_count = r.u32();
  h.face_count = r.u32();
  h.step_motion = r.f64();
  h.step_color_intra = r.f64();
  h.step_color_inter = r.f64();
  try {
    h.params().validate();
  } catch (const ParameterError& e) {
    throw CorruptStreamError(std::string("GOF header: ") + e.what());
  }
  if (h.frame_count == 0) throw CorruptStreamError("GOF header: zero frames");
  auto copy = [](std::span<const std::uint8_t> s) { return std::vector<std::uint8_t>(s.begin(), s.end()); };
  g.octree = copy(r.section());
  g.index_runs = copy(r.section());
  g.faces = copy(r.section());
  g.frames.resize(h.frame_count);
  for (std::uint32_t t = 0; t < h.frame_count; ++t) {
    if (t > 0) g.frames[t].motion = copy(r.section());
    g.frames[t].color = copy(r.section());
  }
  if (!r.done()) throw TrailingBytesError("GOF record: trailing bytes");
  return g;
}

SectionSizes EncodedGof::sizes() const {
  SectionSizes s;
  s.header = GofHeader::kSerializedSize;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (t == 0)
      s.geometry.push_back(3 * 4 + octree.size() + index_runs.size() + faces.size());
    else
      s.geometry.push_back(4 + frames[t].motion.size());
    s.color.push_back(4 + frames[t].color.size());
  }
  return s;
}

Vec3 quantize_vertex(const Vec3& v, std::uint32_t depth) {
  const double step = voxel_size(depth);
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    // Midrise reconstruction, kept inside the cube for a coordinate of exactly 0.
    out[k] = std::clamp(transform::quantize(v[k], step, transform::QuantizerMode::midrise), 0.5 * step,
                        1.0 - 0.5 * step);
  }
  return out;
}

std::vector<std::uint32_t> canonical_vertex_order(const TriangleCloudFrame& reference, std::uint32_t depth) {
  const auto n = reference.vertices.size();
  std::vector<MortonCode> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = geom::quantize_point(quantize_vertex(reference.vertices[i], depth), depth);
    codes[i] = geom::morton_encode(q[0], q[1], q[2], depth);
  }
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::stable_sort(perm.begin(), perm.end(), [&](auto a, auto b) { return codes[a] < codes[b]; });
  return perm;
}

GroupOfFrames canonicalize(const GroupOfFrames& gof, std::uint32_t depth) {
  if (gof.frames.empty()) return gof;
  const auto perm = canonical_vertex_order(gof.frames.front(), depth);
  std::vector<std::uint32_t> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = static_cast<std::uint32_t>(k);
  GroupOfFrames out;
  out.frames.reserve(gof.frames.size());
  for (const auto& f : gof.frames) {
    TriangleCloudFrame g;
    g.upsample = f.upsample;
    g.colors = f.colors;
    g.vertices.resize(f.vertices.size());
    for (std::size_t k = 0; k < perm.size(); ++k) g.vertices[k] = f.vertices[perm[k]];
    g.faces.resize(f.faces.size());
    for (std::size_t m = 0; m < f.faces.size(); ++m)
      for (int c = 0; c < 3; ++c) g.faces[m][c] = inverse[f.faces[m][c]];
    out.frames.push_back(std::move(g));
  }
  return out;
}

GofEncoder::GofEncoder(const CodecParams& params) : params_(params) { params_.validate(); }

void GofEncoder::encode_reference(const TriangleCloudFrame& frame, EncodedGof& out) {
  validate_frame(frame);
  if (frame.vertices.empty()) throw ConsistencyError("reference frame has no vertices");
  if (frame.upsample != params_.upsample) throw ConsistencyError("frame upsample factor differs from codec parameters");
  const auto depth = params_.depth;
  ref_ = ReferenceState{};
  ref_.depth = depth;
  ref_.upsample = params_.upsample;
  ref_.faces = frame.faces;

  // Geometry: snap vertices to voxel centers, remove duplicates.
  ref_.quantized_vertices.reserve(frame.vertices.size());
  for (const auto& v : frame.vertices) ref_.quantized_vertices.push_back(quantize_vertex(v, depth));
  auto vox = geom::voxelize(ref_.quantized_vertices, Matrix::from_rows(frame.vertices), depth);
  ref_.vertex_index = std::move(vox.index_map);
  ref_.vertex_voxel_centers = std::move(vox.voxel_centers);
  const Matrix vertex_means = std::move(vox.voxel_set.attributes);
  ref_.vertex_voxels = VoxelSet{depth, std::move(vox.voxel_set.codes), {}};
  ref_.vertex_plan = transform::raht_plan(ref_.vertex_voxels.codes, depth);

  out.octree = entropy::deflate_bytes(octree::serialize(ref_.vertex_voxels));
  out.index_runs = entropy::index_runs_encode(ref_.vertex_index);
  out.faces = face_bytes(ref_.faces);

  // Color: voxelize the refined quantized vertices with the input colors.
  ref_.refined_vertices = geom::refine(ref_.quantized_vertices, ref_.faces, ref_.upsample);
  auto rvox = geom::voxelize(ref_.refined_vertices, Matrix::from_rows(frame.colors), depth);
  ref_.refined_index = std::move(rvox.index_map);
  Matrix voxel_colors = std::move(rvox.voxel_set.attributes);
  ref_.refined_voxels = VoxelSet{depth, std::move(rvox.voxel_set.codes), {}};
  ref_.refined_plan = transform::raht_plan(ref_.refined_voxels.codes, depth);

  detail::ByteWriter w;
  auto coded = coding::encode_planes(w, ref_.refined_plan, voxel_colors, params_.step_color_intra);
  EncodedFrame ef;
  ef.color = w.take();
  out.frames.clear();
  out.frames.push_back(std::move(ef));

  buffer_.vertices = ref_.vertex_voxel_centers;
  buffer_.colors = coded.reconstruction;

  trace_ = FrameTrace{};
  trace_.geometry_input = vertex_means.to_vec3_rows();
  trace_.geometry_recon = ref_.vertex_voxel_centers;
  trace_.color_input = std::move(voxel_colors);
  trace_.color_recon = std::move(coded.reconstruction);
  trace_.color_symbols = std::move(coded.symbols);
  have_reference_ = true;
}

EncodedFrame GofEncoder::encode_predicted(const TriangleCloudFrame& frame) {
  if (!have_reference_) throw ParameterError("predicted frame before reference frame");
  if (frame.faces != ref_.faces || frame.vertices.size() != ref_.quantized_vertices.size() ||
      frame.colors.size() != ref_.refined_vertices.size())
    throw ConsistencyError("predicted frame is inconsistent with the reference frame");
  const double scale = std::ldexp(1.0, static_cast<int>(params_.depth));
  const double inv_scale = voxel_size(params_.depth);
  const std::size_t nv = ref_.vertex_voxels.size();

  // Geometry: per-voxel mean of this frame's vertices, residual in voxel units.
  const Matrix positions = geom::average_by_index(ref_.vertex_index, nv, Matrix::from_rows(frame.vertices));
  Matrix residual(nv, 3);
  for (std::size_t i = 0; i < nv; ++i)
    for (int c = 0; c < 3; ++c) residual(i, c) = (positions(i, c) - buffer_.vertices[i][c]) * scale;
  EncodedFrame ef;
  detail::ByteWriter mw;
  auto motion = coding::encode_planes(mw, ref_.vertex_plan, residual, params_.step_motion);
  ef.motion = mw.take();
  for (std::size_t i = 0; i < nv; ++i)
    for (int c = 0; c < 3; ++c) buffer_.vertices[i][c] += motion.reconstruction(i, c) * inv_scale;

  // Color: per-voxel mean against the reference refined voxels.
  const std::size_t nr = ref_.refined_voxels.size();
  Matrix colors = geom::average_by_index(ref_.refined_index, nr, Matrix::from_rows(frame.colors));
  Matrix color_residual(nr, 3);
  for (std::size_t i = 0; i < nr; ++i)
    for (int c = 0; c < 3; ++c) color_residual(i, c) = colors(i, c) - buffer_.colors(i, c);
  detail::ByteWriter cw;
  auto color = coding::encode_planes(cw, ref_.refined_plan, color_residual, params_.step_color_inter);
  ef.color = cw.take();
  for (std::size_t i = 0; i < nr; ++i)
    for (int c = 0; c < 3; ++c) buffer_.colors(i, c) += color.reconstruction(i, c);

  trace_ = FrameTrace{};
  trace_.geometry_input = positions.to_vec3_rows();
  trace_.geometry_recon = buffer_.vertices;
  trace_.color_input = std::move(colors);
  trace_.color_recon = buffer_.colors;
  trace_.motion_symbols = std::move(motion.symbols);
  trace_.color_symbols = std::move(color.symbols);
  return ef;
}

GofDecoder::GofDecoder(const GofHeader& header) : header_(header) {
  try {
    header_.params().validate();
  } catch (const ParameterError& e) {
    throw CorruptStreamError(std::string("GOF header: ") + e.what());
  }
}

TriangleCloudFrame GofDecoder::decode_reference(const EncodedGof& gof) {
  if (gof.frames.empty()) throw CorruptStreamError("GOF has no reference frame payload");
  const auto depth = header_.depth;
  ref_ = ReferenceState{};
  ref_.depth = depth;
  ref_.upsample = header_.upsample;

  ref_.vertex_voxels = octree::parse(entropy::inflate_bytes(gof.octree), depth);
  ref_.vertex_voxel_centers.reserve(ref_.vertex_voxels.size());
  for (auto c : ref_.vertex_voxels.codes) ref_.vertex_voxel_centers.push_back(geom::voxel_center(c, depth));
  ref_.vertex_index = entropy::index_runs_decode(gof.index_runs);
  if (ref_.vertex_index.size() != header_.vertex_count)
    throw CorruptStreamError("index map length differs from vertex count");
  if (!ref_.vertex_index.empty() && ref_.vertex_index.back() + 1 != ref_.vertex_voxels.size())
    throw CorruptStreamError("index map does not cover the vertex voxels");
  ref_.quantized_vertices = gather<Vec3>(ref_.vertex_voxel_centers, ref_.vertex_index);
  ref_.faces = parse_faces(gof.faces, header_.face_count, header_.vertex_count);
  ref_.vertex_plan = transform::raht_plan(ref_.vertex_voxels.codes, depth);
  derive_refined(ref_);

  detail::ByteReader r(gof.frames[0].color);
  buffer_.vertices = ref_.vertex_voxel_centers;
  buffer_.colors = coding::decode_planes(r, ref_.refined_plan, 3, header_.step_color_intra);
  if (!r.done()) throw TrailingBytesError("reference color payload: trailing bytes");
  have_reference_ = true;

  TriangleCloudFrame out;
  out.upsample = header_.upsample;
  out.vertices = ref_.quantized_vertices;
  out.faces = ref_.faces;
  out.colors = gather_rows(buffer_.colors, ref_.refined_index);
  return out;
}

TriangleCloudFrame GofDecoder::decode_predicted(const EncodedFrame& frame) {
  if (!have_reference_) throw CorruptStreamError("predicted frame before reference frame");
  const double inv_scale = voxel_size(header_.depth);
  detail::ByteReader mr(frame.motion);
  const Matrix motion = coding::decode_planes(mr, ref_.vertex_plan, 3, header_.step_motion);
  if (!mr.done()) throw TrailingBytesError("motion payload: trailing bytes");
  detail::ByteReader cr(frame.color);
  const Matrix color = coding::decode_planes(cr, ref_.refined_plan, 3, header_.step_color_inter);
  if (!cr.done()) throw TrailingBytesError("color payload: trailing bytes");

  for (std::size_t i = 0; i < buffer_.vertices.size(); ++i)
    for (int c = 0; c < 3; ++c) buffer_.vertices[i][c] += motion(i, c) * inv_scale;
  for (std::size_t i = 0; i < buffer_.colors.rows(); ++i)
    for (int c = 0; c < 3; ++c) buffer_.colors(i, c) += color(i, c);

  TriangleCloudFrame out;
  out.upsample = header_.upsample;
  out.vertices = gather<Vec3>(buffer_.vertices, ref_.vertex_index);
  out.faces = ref_.faces;
  out.colors = gather_rows(buffer_.colors, ref_.refined_index);
  return out;
}

GofEncodeResult encode_gof(const GroupOfFrames& gof, const CodecParams& params, const EncodeOptions& options) {
  params.validate();
  validate_gof(gof);
  GofEncodeResult res;
  res.vertex_order = canonical_vertex_order(gof.frames.front(), params.depth);
  const GroupOfFrames canon = canonicalize(gof, params.depth);

  auto& h = res.encoded.header;
  h.depth = params.depth;
  h.upsample = params.upsample;
  h.frame_count = static_cast<std::uint32_t>(canon.frames.size());
  h.vertex_count = static_cast<std::uint32_t>(canon.frames.front().vertices.size());
  h.face_count = static_cast<std::uint32_t>(canon.frames.front().faces.size());
  h.step_motion = params.step_motion;
  h.step_color_intra = params.step_color_intra;
  h.step_color_inter = params.step_color_inter;

  GofEncoder enc(params);
  auto record = [&] {
    if (options.keep_traces) res.traces.push_back(enc.last_trace());
    if (options.keep_buffers) res.buffers.push_back(enc.buffer());
  };
  enc.encode_reference(canon.frames.front(), res.encoded);
  record();
  for (std::size_t t = 1; t < canon.frames.size(); ++t) {
    res.encoded.frames.push_back(enc.encode_predicted(canon.frames[t]));
    record();
  }
  return res;
}

GofDecodeResult decode_gof_with_state(const EncodedGof& encoded) {
  if (encoded.frames.size() != encoded.header.frame_count)
    throw CorruptStreamError("GOF frame payload count differs from header");
  GofDecodeResult res;
  GofDecoder dec(encoded.header);
  res.frames.frames.push_back(dec.decode_reference(encoded));
  res.buffers.push_back(dec.buffer());
  for (std::size_t t = 1; t < encoded.frames.size(); ++t) {
    res.frames.frames.push_back(dec.decode_predicted(encoded.frames[t]));
    res.buffers.push_back(dec.buffer());
  }
  return res;
}

GroupOfFrames decode_gof(const EncodedGof& encoded) { return std::move(decode_gof_with_state(encoded).frames); }

std::vector<VoxelizedFrame> voxelized_inputs(const GroupOfFrames& gof, std::uint32_t depth) {
  validate_gof(gof);
  const GroupOfFrames canon = canonicalize(gof, depth);
  const auto& ref = canon.frames.front();
  std::vector<Vec3> quantized;
  quantized.reserve(ref.vertices.size());
  for (const auto& v : ref.vertices) quantized.push_back(quantize_vertex(v, depth));
  const auto vox = geom::voxelize(quantized, depth);
  const auto rvox = geom::voxelize(geom::refine(quantized, ref.faces, ref.upsample), depth);
  std::vector<VoxelizedFrame> out;
  for (const auto& f : canon.frames) {
    VoxelizedFrame vf;
    vf.geometry =
        geom::average_by_index(vox.index_map, vox.voxel_set.size(), Matrix::from_rows(f.vertices)).to_vec3_rows();
    vf.color = geom::average_by_index(rvox.index_map, rvox.voxel_set.size(), Matrix::from_rows(f.colors));
    out.push_back(std::move(vf));
  }
  return out;
}

std::vector<GroupOfFrames> all_intra(std::span<const GroupOfFrames> gofs) {
  std::vector<GroupOfFrames> out;
  for (const auto& g : gofs)
    for (const auto& f : g.frames) out.push_back(GroupOfFrames{{f}});
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<GofEncodeResult> encode_gofs(std::span<const GroupOfFrames> gofs, const CodecParams& params,
                                         const EncodeOptions& options, unsigned jobs) {
  std::vector<GofEncodeResult> out(gofs.size());
  parallel_for(gofs.size(), jobs, [&](std::size_t i) { out[i] = encode_gof(gofs[i], params, options); });
  return out;
}

std::vector<GofDecodeResult> decode_gofs(std::span<const EncodedGof> encoded, unsigned jobs) {
  std::vector<GofDecodeResult> out(encoded.size());
  parallel_for(encoded.size(), jobs, [&](std::size_t i) { out[i] = decode_gof_with_state(encoded[i]); });
  return out;
}

std::vector<EncodedGof> encode_sequence(std::span<const GroupOfFrames> gofs, const CodecParams& params,
                                        unsigned jobs) {
  std::vector<EncodedGof> out;
  for (auto& r : encode_gofs(gofs, params, {}, jobs)) out.push_back(std::move(r.encoded));
  return out;
}

std::vector<GroupOfFrames> decode_sequence(std::span<const EncodedGof> encoded, unsigned jobs) {
  std::vector<GroupOfFrames> out;
  for (auto& r : decode_gofs(encoded, jobs)) out.push_back(std::move(r.frames));
  return out;
}

std::vector<std::uint8_t> write_container(std::span<const EncodedGof> gofs) {
  detail::ByteWriter w;
  w.magic(kContainerMagic);
  w.u16(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(gofs.size()));
  for (const auto& g : gofs) w.section(g.serialize());
  return w.take();
}

std::vector<EncodedGof> read_container(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kContainerMagic);
  const auto version = r.u16();
  if (version != kContainerVersion) throw VersionError("unsupported TCB1 version " + std::to_string(version));
  const auto count = r.u32();
  std::vector<EncodedGof> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(EncodedGof::parse(r.section()));
  if (!r.done()) throw TrailingBytesError("TCB1: trailing bytes after last GOF");
  return out;
}

}  // namespace tricloud::codec
