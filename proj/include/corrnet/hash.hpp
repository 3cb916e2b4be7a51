#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace corrnet {

/// FNV-1a, 64 bit.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(double v) {
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof v);
    update(std::string_view(buf, sizeof buf));
  }
  void update(std::uint64_t v) {
    char buf[sizeof v];
    std::memcpy(buf, &v, sizeof v);
    update(std::string_view(buf, sizeof buf));
  }
  [[nodiscard]] std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

}  // namespace corrnet
