#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coalab {

/// 256-bit SHA-256 output.
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

std::string to_hex(const Digest& digest);
Digest digest_from_hex(std::string_view hex);

/// First eight bytes of the digest read as a big-endian integer.
std::uint64_t leading_u64(const Digest& digest);

/// Top 53 bits of the digest mapped into [0, 1).
double digest_fraction(const Digest& digest);

/// The digest read as a 256-bit big-endian integer, reduced modulo `modulus`.
std::uint64_t digest_mod(const Digest& digest, std::uint64_t modulus);

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    return static_cast<std::size_t>(leading_u64(d));
  }
};

/// Append-only buffer with fixed-width big-endian encoders. Every canonical
/// encoding in the library goes through this type.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v);
  ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
  ByteWriter& bytes(std::span<const std::uint8_t> data);
  ByteWriter& digest(const Digest& d) { return bytes(d); }
  ByteWriter& tag(std::string_view domain);

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }
  Digest hash() const { return sha256(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Cursor over a canonical encoding; throws std::out_of_range on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  bool boolean();
  Digest digest();
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace coalab
