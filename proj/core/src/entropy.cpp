#include "tricloud/entropy.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <string>

#include "tricloud/errors.hpp"

namespace tricloud::entropy {
namespace {

using C = RlgrConstants;

class BitWriter {
 public:
  void bit(unsigned b) {
    acc_ = static_cast<std::uint8_t>((acc_ << 1) | (b & 1u));
    if (++fill_ == 8) flush();
  }
  void bits(int n, std::uint64_t value) {
    for (int i = n - 1; i >= 0; --i) bit(static_cast<unsigned>((value >> i) & 1u));
  }
  void ones(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) bit(1);
  }
  std::vector<std::uint8_t> finish() {
    if (fill_ > 0) {
      acc_ = static_cast<std::uint8_t>(acc_ << (8 - fill_));
      flush();
    }
    return std::move(out_);
  }

 private:
  void flush() {
    out_.push_back(acc_);
    acc_ = 0;
    fill_ = 0;
  }
  std::vector<std::uint8_t> out_;
  std::uint8_t acc_ = 0;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}
  unsigned bit() {
    if (pos_ >= data_.size() * 8) throw CorruptStreamError("RLGR: premature end of stream");
    const unsigned b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return b;
  }
  std::uint64_t bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | bit();
    return v;
  }
  // Every unread bit must be zero padding inside the final byte.
  void expect_end() const {
    if (data_.size() != (pos_ + 7) / 8) throw CorruptStreamError("RLGR: trailing bytes after last symbol");
    for (std::size_t p = pos_; p < data_.size() * 8; ++p)
      if ((data_[p >> 3] >> (7 - (p & 7))) & 1u) throw CorruptStreamError("RLGR: nonzero padding bits");
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void raise(int& scaled, int delta) { scaled = std::min(scaled + delta, C::kMaxScaled); }
void lower(int& scaled, int delta) { scaled = std::max(scaled - delta, 0); }

void adapt_gr(int& krp, std::uint64_t prefix) {
  if (prefix == 0)
    lower(krp, 2);
  else if (prefix > 1)
    raise(krp, static_cast<int>(std::min<std::uint64_t>(prefix, C::kMaxScaled)));
}

void put_gr(BitWriter& w, int& krp, std::uint64_t value) {
  const int kr = krp >> C::kScaleBits;
  const std::uint64_t prefix = value >> kr;
  if (prefix < static_cast<std::uint64_t>(C::kEscapeUnary)) {
    w.ones(prefix);
    w.bit(0);
    w.bits(kr, value);
  } else {
    // Escape: 32 ones, 6-bit (bit length - 1), then the value itself.
    w.ones(C::kEscapeUnary);
    const int width = std::bit_width(value);
    w.bits(6, static_cast<std::uint64_t>(width - 1));
    w.bits(width, value);
  }
  adapt_gr(krp, prefix);
}

std::uint64_t get_gr(BitReader& r, int& krp) {
  const int kr = krp >> C::kScaleBits;
  std::uint64_t prefix = 0;
  while (prefix < static_cast<std::uint64_t>(C::kEscapeUnary) && r.bit() == 1) ++prefix;
  std::uint64_t value;
  if (prefix == static_cast<std::uint64_t>(C::kEscapeUnary)) {
    const int width = static_cast<int>(r.bits(6)) + 1;
    value = r.bits(width);
    if ((value >> kr) < static_cast<std::uint64_t>(C::kEscapeUnary) || static_cast<int>(std::bit_width(value)) != width)
      throw CorruptStreamError("RLGR: non-canonical escape codeword");
    prefix = value >> kr;
  } else {
    value = (prefix << kr) | r.bits(kr);
  }
  adapt_gr(krp, prefix);
  return value;
}

std::uint64_t interleave(std::int64_t v) {
  return v >= 0 ? static_cast<std::uint64_t>(v) << 1 : (static_cast<std::uint64_t>(-(v + 1)) << 1) | 1u;
}
std::int64_t deinterleave(std::uint64_t u) {
  return (u & 1u) ? -static_cast<std::int64_t>(u >> 1) - 1 : static_cast<std::int64_t>(u >> 1);
}

}  // namespace

std::vector<std::uint8_t> rlgr_encode(std::span<const std::int64_t> symbols) {
  for (auto s : symbols)
    if (s > kMaxSymbolMagnitude || s < -kMaxSymbolMagnitude) throw RangeError("RLGR symbol magnitude too large");
  BitWriter w;
  int kp = 1 << C::kScaleBits;
  int krp = 1 << C::kScaleBits;
  std::size_t i = 0;
  const std::size_t n = symbols.size();
  while (i < n) {
    int k = kp >> C::kScaleBits;
    if (k > 0) {
      std::uint64_t zeros = 0;
      while (i < n && symbols[i] == 0) {
        ++zeros;
        ++i;
      }
      std::uint64_t run = std::uint64_t{1} << k;
      while (zeros >= run) {
        w.bit(0);
        zeros -= run;
        raise(kp, C::kRunUp);
        k = kp >> C::kScaleBits;
        run = std::uint64_t{1} << k;
      }
      w.bit(1);
      w.bits(k, zeros);
      if (i < n) {
        const std::int64_t v = symbols[i++];
        w.bit(v < 0 ? 1 : 0);
        put_gr(w, krp, static_cast<std::uint64_t>(std::llabs(v)) - 1);
        lower(kp, C::kRunDown);
      }
    } else {
      const std::uint64_t u = interleave(symbols[i++]);
      put_gr(w, krp, u);
      if (u == 0)
        raise(kp, C::kGrZeroUp);
      else
        lower(kp, C::kGrNonzeroDown);
    }
  }
  return w.finish();
}

std::vector<std::int64_t> rlgr_decode(std::span<const std::uint8_t> bytes, std::size_t count) {
  BitReader r(bytes);
  std::vector<std::int64_t> out;
  out.reserve(count);
  int kp = 1 << C::kScaleBits;
  int krp = 1 << C::kScaleBits;
  auto append_zeros = [&](std::uint64_t z) {
    if (z > count - out.size()) throw CorruptStreamError("RLGR: zero run overruns symbol count");
    out.insert(out.end(), z, 0);
  };
  while (out.size() < count) {
    int k = kp >> C::kScaleBits;
    if (k > 0) {
      while (r.bit() == 0) {
        append_zeros(std::uint64_t{1} << k);
        raise(kp, C::kRunUp);
        k = kp >> C::kScaleBits;
      }
      append_zeros(r.bits(k));
      if (out.size() == count) break;
      const bool negative = r.bit() == 1;
      const std::uint64_t mag = get_gr(r, krp) + 1;
      if (mag > static_cast<std::uint64_t>(kMaxSymbolMagnitude)) throw CorruptStreamError("RLGR: magnitude overflow");
      out.push_back(negative ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag));
      lower(kp, C::kRunDown);
    } else {
      const std::uint64_t u = get_gr(r, krp);
      if ((u >> 1) > static_cast<std::uint64_t>(kMaxSymbolMagnitude)) throw CorruptStreamError("RLGR: magnitude overflow");
      out.push_back(deinterleave(u));
      if (u == 0)
        raise(kp, C::kGrZeroUp);
      else
        lower(kp, C::kGrNonzeroDown);
    }
  }
  r.expect_end();
  return out;
}

std::vector<std::uint64_t> index_runs(std::span<const std::uint32_t> index_map) {
  std::vector<std::uint64_t> runs;
  if (index_map.empty()) return runs;
  if (index_map[0] != 0) throw MalformedIndexMapError("index map must start at 0");
  bool unit = true;
  std::uint64_t length = 0;
  std::int64_t prev = -1;
  for (std::size_t i = 0; i < index_map.size(); ++i) {
    const std::int64_t step = static_cast<std::int64_t>(index_map[i]) - prev;
    if (step != 0 && step != 1)
      throw MalformedIndexMapError("index map step " + std::to_string(step) + " at position " + std::to_string(i));
    if ((step == 1) != unit) {
      runs.push_back(length);
      unit = !unit;
      length = 0;
    }
    ++length;
    prev = index_map[i];
  }
  runs.push_back(length);
  if (unit) runs.push_back(0);
  return runs;
}

std::vector<std::uint32_t> index_map_from_runs(std::span<const std::uint64_t> runs) {
  if (runs.size() % 2 != 0) throw CorruptStreamError("index runs must come in unit/zero pairs");
  std::vector<std::uint32_t> map;
  std::int64_t value = -1;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const bool unit = r % 2 == 0;
    if (runs[r] > (std::uint64_t{1} << 32) - map.size()) throw CorruptStreamError("index runs too long");
    if (r == 0 && runs[r] == 0) throw CorruptStreamError("index map must start with a unit step");
    for (std::uint64_t k = 0; k < runs[r]; ++k) {
      if (unit) ++value;
      map.push_back(static_cast<std::uint32_t>(value));
    }
  }
  return map;
}

std::vector<std::uint8_t> index_runs_encode(std::span<const std::uint32_t> index_map) {
  std::vector<std::uint8_t> raw;
  for (auto run : index_runs(index_map)) {
    do {
      std::uint8_t b = run & 0x7f;
      run >>= 7;
      if (run) b |= 0x80;
      raw.push_back(b);
    } while (run);
  }
  return deflate_bytes(raw);
}

std::vector<std::uint32_t> index_runs_decode(std::span<const std::uint8_t> bytes) {
  const auto raw = inflate_bytes(bytes);
  std::vector<std::uint64_t> runs;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (i >= raw.size()) throw CorruptStreamError("index runs: truncated varint");
      if (shift > 63) throw CorruptStreamError("index runs: varint overflow");
      const auto b = raw[i++];
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      shift += 7;
      if (!(b & 0x80)) break;
    }
    runs.push_back(v);
  }
  return index_map_from_runs(runs);
}

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> data) {
  uLongf cap = compressBound(static_cast<uLong>(data.size()));
  std::vector<std::uint8_t> out(cap);
  const int rc = compress2(out.data(), &cap, data.data(), static_cast<uLong>(data.size()), Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw Error("zlib compress failed with code " + std::to_string(rc));
  out.resize(cap);
  return out;
}

std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw Error("zlib inflateInit failed");
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[16384];
  int rc;
  do {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw CorruptStreamError("zlib stream is corrupt or truncated");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw CorruptStreamError("zlib stream is truncated");
    }
  } while (rc != Z_STREAM_END);
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw CorruptStreamError("trailing bytes after zlib stream");
  return out;
}

}  // namespace tricloud::entropy
