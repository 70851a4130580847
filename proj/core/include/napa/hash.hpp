#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace napa {

// FNV-1a, 64-bit. Used for content addressing and trace integrity checks;
// not collision-resistant against adversaries.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state ^= c;
      state *= 0x100000001b3ull;
    }
  }
  std::uint64_t digest() const { return state; }
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  Fnv1a h;
  h.update(bytes);
  return h.digest();
}

std::string hash_hex(std::uint64_t h);

}  // namespace napa
