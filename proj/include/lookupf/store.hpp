#pragma once

// Descriptor-store / index file format ("LFDS"), little-endian:
//
//   magic "LFDS" | version u8 (=1) | dim u32 | count u64
//   | manifest_len u16 | manifest bytes (UTF-8)
//   | count x { id_len u16 | id bytes | dim x f32 }
//   | crc32 u32 over every preceding byte

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <zlib.h>

#include "lookupf/error.hpp"
#include "lookupf/image_io.hpp"

namespace lookupf {

inline constexpr char kStoreMagic[4] = {'L', 'F', 'D', 'S'};
inline constexpr std::uint8_t kStoreVersion = 1;

struct StoreRecord {
  std::string id;
  std::vector<float> values;

  friend bool operator==(const StoreRecord&, const StoreRecord&) = default;
};

struct DescriptorStore {
  std::uint32_t dim = 0;
  std::string manifest;
  std::vector<StoreRecord> records;

  friend bool operator==(const DescriptorStore&, const DescriptorStore&) = default;
};

inline std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace detail {

class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
                                                      std::conditional_t<sizeof(T) == 4, std::int32_t,
                                                                         std::int64_t>,
                                                      T>>;
    U u = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(u & 0xFF));
      u = static_cast<U>(u >> 8);
    }
  }
  void put_bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
                                                      std::conditional_t<sizeof(T) == 4, std::int32_t,
                                                                         std::int64_t>,
                                                      T>>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u = static_cast<U>(u | (static_cast<U>(data_[pos_ + i]) << (8 * i)));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(u);
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw Error(ErrorCode::TruncatedFile, "unexpected end of store data");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_store(const DescriptorStore& store) {
  if (store.manifest.size() > 0xFFFF) {
    throw Error(ErrorCode::InvalidParams, "manifest longer than 65535 bytes");
  }
  detail::ByteWriter w;
  w.put_bytes(kStoreMagic, 4);
  w.put<std::uint8_t>(kStoreVersion);
  w.put<std::uint32_t>(store.dim);
  w.put<std::uint64_t>(store.records.size());
  w.put<std::uint16_t>(static_cast<std::uint16_t>(store.manifest.size()));
  w.put_bytes(store.manifest.data(), store.manifest.size());
  for (const auto& r : store.records) {
    if (r.values.size() != store.dim) {
      throw Error(ErrorCode::DimensionMismatch, "record " + r.id + " has wrong dimension");
    }
    if (r.id.size() > 0xFFFF) throw Error(ErrorCode::InvalidParams, "id longer than 65535 bytes");
    w.put<std::uint16_t>(static_cast<std::uint16_t>(r.id.size()));
    w.put_bytes(r.id.data(), r.id.size());
    for (float v : r.values) w.put<float>(v);
  }
  const auto crc = crc32_of(w.bytes().data(), w.bytes().size());
  w.put<std::uint32_t>(crc);
  return std::move(w.bytes());
}

inline DescriptorStore decode_store(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "store shorter than its magic");
  if (std::memcmp(bytes.data(), kStoreMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not an LFDS store");
  }
  detail::ByteReader r(bytes.data() + 4, bytes.size() - 4);
  const auto version = r.get<std::uint8_t>();
  if (version != kStoreVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "store version " + std::to_string(version));
  }
  DescriptorStore store;
  store.dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();
  const auto manifest_len = r.get<std::uint16_t>();
  store.manifest = r.get_string(manifest_len);
  // every record needs at least id_len + dim floats
  const std::uint64_t min_record = 2 + 4ull * store.dim;
  if (count > r.remaining() / min_record + 1) {
    throw Error(ErrorCode::TruncatedFile, "record count exceeds file size");
  }
  store.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    StoreRecord rec;
    const auto id_len = r.get<std::uint16_t>();
    rec.id = r.get_string(id_len);
    rec.values.resize(store.dim);
    for (auto& v : rec.values) v = r.get<float>();
    store.records.push_back(std::move(rec));
  }
  if (r.remaining() < 4) throw Error(ErrorCode::TruncatedFile, "missing checksum");
  if (r.remaining() > 4) throw Error(ErrorCode::MalformedFile, "trailing bytes after records");
  const auto stored = r.get<std::uint32_t>();
  if (stored != crc32_of(bytes.data(), bytes.size() - 4)) {
    throw Error(ErrorCode::ChecksumMismatch, "CRC32 does not match contents");
  }
  return store;
}

inline void save_store(const DescriptorStore& store, const std::filesystem::path& path) {
  write_file_bytes(path, encode_store(store));
}

inline DescriptorStore load_store(const std::filesystem::path& path) {
  return decode_store(read_file_bytes(path));
}

}  // namespace lookupf
