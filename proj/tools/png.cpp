#include "png.hpp"

#include <zlib.h>

#include <stdexcept>

#include "tricloud/errors.hpp"
#include "tricloud/io.hpp"

namespace tricloud::cli {
namespace {

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32be(out, static_cast<std::uint32_t>(data.size()));
  const auto start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(std::uint32_t width, std::uint32_t height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != std::size_t(width) * height * 3) throw ParameterError("png: pixel buffer has wrong size");
  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32be(ihdr, width);
  put_u32be(ihdr, height);
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit truecolor, no interlace
  chunk(out, "IHDR", ihdr);

  std::vector<std::uint8_t> raw;
  raw.reserve((std::size_t(width) * 3 + 1) * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    raw.push_back(0);
    const auto* row = rgb.data() + std::size_t(y) * width * 3;
    raw.insert(raw.end(), row, row + std::size_t(width) * 3);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> idat(len);
  if (compress2(idat.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  idat.resize(len);
  chunk(out, "IDAT", idat);
  chunk(out, "IEND", {});
  return out;
}

void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
               const std::vector<std::uint8_t>& rgb) {
  io::write_file(path, encode_png(width, height, rgb));
}

}  // namespace tricloud::cli
