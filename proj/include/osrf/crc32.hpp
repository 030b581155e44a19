#pragma once

#include <cstddef>
#include <cstdint>

namespace osrf {

// CRC-32 (IEEE 802.3 polynomial, reflected), the same checksum zlib computes.
// Kept in-tree so container files have no library dependency.
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

// Incremental form for streaming writers/readers.
class Crc32 {
 public:
  void update(const void* data, std::size_t len) { state_ = crc32(data, len, state_); }
  std::uint32_t value() const { return state_; }

 private:
  std::uint32_t state_ = 0;
};

}  // namespace osrf
