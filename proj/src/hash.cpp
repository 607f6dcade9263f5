#include "coalab/hash.hpp"

#include <openssl/sha.h>

#include <stdexcept>

namespace coalab {

__extension__ typedef unsigned __int128 u128;

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw std::invalid_argument("digest hex must be 64 characters");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw std::invalid_argument("bad hex digit");
  };
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i) {
    d[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return d;
}

std::uint64_t leading_u64(const Digest& digest) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | digest[i];
  return v;
}

double digest_fraction(const Digest& digest) {
  return static_cast<double>(leading_u64(digest) >> 11) * 0x1.0p-53;
}

std::uint64_t digest_mod(const Digest& digest, std::uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("digest_mod: zero modulus");
  u128 r = 0;
  for (auto b : digest) r = ((r << 8) | b) % modulus;
  return static_cast<std::uint64_t>(r);
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

ByteWriter& ByteWriter::i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::bytes(std::span<const std::uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

ByteWriter& ByteWriter::tag(std::string_view domain) {
  u32(static_cast<std::uint32_t>(domain.size()));
  buf_.insert(buf_.end(), domain.begin(), domain.end());
  return *this;
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) throw std::out_of_range("truncated encoding");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::int64_t ByteReader::i64() { return static_cast<std::int64_t>(u64()); }

bool ByteReader::boolean() {
  auto v = u8();
  if (v > 1) throw std::invalid_argument("bad boolean byte");
  return v == 1;
}

Digest ByteReader::digest() {
  need(32);
  Digest d{};
  for (auto& b : d) b = data_[pos_++];
  return d;
}

}  // namespace coalab
