#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tricloud::cli {

// 8-bit RGB, rows top to bottom.
std::vector<std::uint8_t> encode_png(std::uint32_t width, std::uint32_t height, const std::vector<std::uint8_t>& rgb);
void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
               const std::vector<std::uint8_t>& rgb);

}  // namespace tricloud::cli
