#include "tricloud/octree.hpp"

#include "byte_io.hpp"
#include "coefficient_coding.hpp"
#include "tricloud/entropy.hpp"
#include "tricloud/errors.hpp"
#include "tricloud/transform.hpp"

namespace tricloud::octree {
namespace {

void emit_node(std::span<const MortonCode> codes, std::uint32_t level, std::uint32_t depth,
               std::vector<std::uint8_t>& out) {
  const std::uint32_t shift = 3 * (depth - 1 - level);
  std::size_t begin[9];
  std::uint8_t occupancy = 0;
  std::size_t pos = 0;
  for (unsigned child = 0; child < 8; ++child) {
    begin[child] = pos;
    while (pos < codes.size() && ((codes[pos] >> shift) & 7u) == child) ++pos;
    if (pos > begin[child]) occupancy |= static_cast<std::uint8_t>(0x80u >> child);
  }
  begin[8] = pos;
  out.push_back(occupancy);
  if (level + 1 == depth) return;
  for (unsigned child = 0; child < 8; ++child)
    if (begin[child + 1] > begin[child])
      emit_node(codes.subspan(begin[child], begin[child + 1] - begin[child]), level + 1, depth, out);
}

class Parser {
 public:
  Parser(std::span<const std::uint8_t> bytes, std::uint32_t depth) : bytes_(bytes), depth_(depth) {}

  void node(MortonCode prefix, std::uint32_t level, std::vector<MortonCode>& codes) {
    if (pos_ >= bytes_.size()) throw TruncatedStreamError("octree: stream ends inside the tree");
    const std::uint8_t occupancy = bytes_[pos_++];
    if (occupancy == 0) throw CorruptStreamError("octree: internal node without children");
    for (unsigned child = 0; child < 8; ++child) {
      if (!(occupancy & (0x80u >> child))) continue;
      const MortonCode code = (prefix << 3) | child;
      if (level + 1 == depth_)
        codes.push_back(code);
      else
        node(code, level + 1, codes);
    }
  }
  std::size_t consumed() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint32_t depth_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const VoxelSet& voxels) {
  if (voxels.codes.empty()) throw EmptySetError("cannot serialize an empty voxel set");
  if (voxels.depth < 1 || voxels.depth > 21) throw ParameterError("octree depth must be in [1, 21]");
  for (std::size_t i = 1; i < voxels.codes.size(); ++i)
    if (voxels.codes[i] <= voxels.codes[i - 1]) throw ParameterError("voxel codes must be strictly increasing");
  if (voxels.depth < 21 && (voxels.codes.back() >> (3 * voxels.depth)) != 0)
    throw RangeError("voxel code exceeds octree depth");
  std::vector<std::uint8_t> out;
  emit_node(voxels.codes, 0, voxels.depth, out);
  return out;
}

VoxelSet parse(std::span<const std::uint8_t> bytes, std::uint32_t depth) {
  if (depth < 1 || depth > 21) throw ParameterError("octree depth must be in [1, 21]");
  VoxelSet out;
  out.depth = depth;
  Parser p(bytes, depth);
  p.node(0, 0, out.codes);
  if (p.consumed() != bytes.size()) throw TrailingBytesError("octree: bytes left after the tree");
  return out;
}

std::size_t internal_node_count(std::span<const MortonCode> codes, std::uint32_t depth) {
  std::size_t count = 0;
  for (std::uint32_t level = 0; level < depth; ++level) {
    const std::uint32_t shift = 3 * (depth - level);
    for (std::size_t i = 0; i < codes.size(); ++i)
      if (i == 0 || (codes[i] >> shift) != (codes[i - 1] >> shift)) ++count;
  }
  return count;
}

BaselineStream baseline_encode(const VoxelSet& colored_voxels, double step_color) {
  if (!colored_voxels.has_attributes()) throw ShapeMismatchError("baseline coder needs per-voxel colors");
  BaselineStream out;
  out.geometry = entropy::deflate_bytes(serialize(colored_voxels));
  const auto plan = transform::raht_plan(colored_voxels.codes, colored_voxels.depth);
  detail::ByteWriter w;
  coding::encode_planes(w, plan, colored_voxels.attributes, step_color);
  out.color = w.take();
  return out;
}

VoxelSet baseline_decode(const BaselineStream& stream, std::uint32_t depth, double step_color) {
  VoxelSet voxels = parse(entropy::inflate_bytes(stream.geometry), depth);
  const auto plan = transform::raht_plan(voxels.codes, depth);
  detail::ByteReader r(stream.color);
  voxels.attributes = coding::decode_planes(r, plan, 3, step_color);
  if (!r.done()) throw TrailingBytesError("baseline: bytes left after color planes");
  return voxels;
}

}  // namespace tricloud::octree
