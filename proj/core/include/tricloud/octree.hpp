#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tricloud/types.hpp"

namespace tricloud::octree {

/// Depth-first occupancy bytes, one per internal node. Children are visited
/// in increasing 3-bit Morton child index; bit (7 - k) marks child k.
/// Throws EmptySetError for an empty set.
std::vector<std::uint8_t> serialize(const VoxelSet& voxels);

/// Inverse of serialize(); codes come out sorted. Throws TruncatedStreamError
/// or TrailingBytesError when the bytes do not form exactly one tree.
VoxelSet parse(std::span<const std::uint8_t> bytes, std::uint32_t depth);

// Internal nodes of the octree over `codes`, counted from the codes directly.
std::size_t internal_node_count(std::span<const MortonCode> codes, std::uint32_t depth);

// Octree geometry plus intra RAHT color coding of a whole voxelized cloud;
// the point-cloud baseline the triangle-cloud coder is compared against.
struct BaselineStream {
  std::vector<std::uint8_t> geometry;  // deflated occupancy bytes
  std::vector<std::uint8_t> color;     // three length-prefixed RLGR planes
};

BaselineStream baseline_encode(const VoxelSet& colored_voxels, double step_color);
VoxelSet baseline_decode(const BaselineStream& stream, std::uint32_t depth, double step_color);

}  // namespace tricloud::octree
