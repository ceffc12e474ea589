#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace landscape {

// FNV-1a over raw bytes; used for provenance tags, not for security.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void update(std::span<const double> values) { update(values.data(), values.size_bytes()); }
  void update_u64(std::uint64_t v) { update(&v, sizeof v); }

  std::uint64_t value() const { return hash_; }
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
      h >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace landscape
