#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tricloud/types.hpp"

// TCF1 frame files and TCG1 group-of-frames containers. Layout is in
// docs/formats.md. A sequence file is one or more TCG1 records back to back.
namespace tricloud::io {

struct SequenceFile {
  std::uint32_t depth = 10;
  std::vector<GroupOfFrames> gofs;

  std::size_t frame_count() const;
};

std::vector<std::uint8_t> encode_frame(const TriangleCloudFrame& frame, std::uint32_t depth);
TriangleCloudFrame decode_frame(std::span<const std::uint8_t> bytes, std::uint32_t* depth = nullptr);

std::vector<std::uint8_t> encode_gof(const GroupOfFrames& gof, std::uint32_t depth);
std::vector<std::uint8_t> encode_sequence(const SequenceFile& seq);
SequenceFile decode_sequence(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Convenience wrappers around the above.
SequenceFile read_sequence(const std::filesystem::path& path);
void write_sequence(const std::filesystem::path& path, const SequenceFile& seq);

}  // namespace tricloud::io
