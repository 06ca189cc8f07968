#include "tricloud/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"
#include "tricloud/errors.hpp"

namespace tricloud::io {
namespace {

constexpr std::string_view kFrameMagic = "TCF1";
constexpr std::string_view kGofMagic = "TCG1";

std::uint8_t to_u8(double c) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(c), 0L, 255L));
}

void write_frame(detail::ByteWriter& w, const TriangleCloudFrame& frame, std::uint32_t depth,
                 bool with_faces) {
  w.magic(kFrameMagic);
  w.u32(depth);
  w.u32(frame.upsample);
  w.u32(static_cast<std::uint32_t>(frame.vertices.size()));
  w.u32(static_cast<std::uint32_t>(frame.faces.size()));
  for (const auto& v : frame.vertices)
    for (double c : v) w.f32(static_cast<float>(c));
  if (with_faces)
    for (const auto& f : frame.faces)
      for (auto idx : f) w.u32(idx);
  for (const auto& c : frame.colors)
    for (double x : c) w.u8(to_u8(x));
}

// Faces come from `shared_faces` when the payload omits them.
TriangleCloudFrame read_frame(detail::ByteReader& r, std::uint32_t* depth,
                              const std::vector<Face>* shared_faces) {
  r.expect_magic(kFrameMagic);
  const auto j = r.u32();
  if (depth) *depth = j;
  TriangleCloudFrame frame;
  frame.upsample = r.u32();
  if (frame.upsample == 0) throw CorruptStreamError("TCF1: zero upsample factor");
  const auto np = r.u32();
  const auto nf = r.u32();
  if (static_cast<std::uint64_t>(np) * 12 > r.remaining())
    throw TruncatedStreamError("TCF1: vertex block truncated");
  frame.vertices.resize(np);
  for (auto& v : frame.vertices)
    for (double& c : v) c = r.f32();
  if (shared_faces) {
    if (shared_faces->size() != nf) throw CorruptStreamError("TCG1: face count differs from reference frame");
    frame.faces = *shared_faces;
  } else {
    if (static_cast<std::uint64_t>(nf) * 12 > r.remaining())
      throw TruncatedStreamError("TCF1: face block truncated");
    frame.faces.resize(nf);
    for (auto& f : frame.faces)
      for (auto& idx : f) idx = r.u32();
  }
  const auto nc = frame.expected_color_count();
  if (nc * 3 > r.remaining()) throw TruncatedStreamError("TCF1: color block truncated");
  frame.colors.resize(nc);
  for (auto& c : frame.colors)
    for (double& x : c) x = r.u8();
  return frame;
}

}  // namespace

std::size_t SequenceFile::frame_count() const {
  std::size_t n = 0;
  for (const auto& g : gofs) n += g.frames.size();
  return n;
}

std::vector<std::uint8_t> encode_frame(const TriangleCloudFrame& frame, std::uint32_t depth) {
  detail::ByteWriter w;
  write_frame(w, frame, depth, true);
  return w.take();
}

TriangleCloudFrame decode_frame(std::span<const std::uint8_t> bytes, std::uint32_t* depth) {
  detail::ByteReader r(bytes);
  auto frame = read_frame(r, depth, nullptr);
  if (!r.done()) throw TrailingBytesError("TCF1: trailing bytes after frame");
  return frame;
}

namespace {
void write_gof(detail::ByteWriter& w, const GroupOfFrames& gof, std::uint32_t depth) {
  w.magic(kGofMagic);
  w.u32(static_cast<std::uint32_t>(gof.frames.size()));
  for (std::size_t t = 0; t < gof.frames.size(); ++t) write_frame(w, gof.frames[t], depth, t == 0);
}
}  // namespace

std::vector<std::uint8_t> encode_gof(const GroupOfFrames& gof, std::uint32_t depth) {
  detail::ByteWriter w;
  write_gof(w, gof, depth);
  return w.take();
}

std::vector<std::uint8_t> encode_sequence(const SequenceFile& seq) {
  detail::ByteWriter w;
  for (const auto& g : seq.gofs) write_gof(w, g, seq.depth);
  return w.take();
}

SequenceFile decode_sequence(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  SequenceFile seq;
  bool first = true;
  if (r.done()) throw BadMagicError("empty file: expected magic 'TCG1'");
  while (!r.done()) {
    r.expect_magic(kGofMagic);
    const auto n = r.u32();
    GroupOfFrames gof;
    gof.frames.reserve(n);
    for (std::uint32_t t = 0; t < n; ++t) {
      std::uint32_t depth = 0;
      gof.frames.push_back(read_frame(r, &depth, t == 0 ? nullptr : &gof.frames.front().faces));
      if (first) {
        seq.depth = depth;
        first = false;
      }
    }
    seq.gofs.push_back(std::move(gof));
  }
  return seq;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

SequenceFile read_sequence(const std::filesystem::path& path) { return decode_sequence(read_file(path)); }

void write_sequence(const std::filesystem::path& path, const SequenceFile& seq) {
  write_file(path, encode_sequence(seq));
}

}  // namespace tricloud::io
