#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace finsent {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) noexcept {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t fnv1a64_doubles(std::span<const double> values, std::uint64_t state);
std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t state);

std::string to_hex16(std::uint64_t value);

/// Stable headline key shared with the scoring service: FNV-1a 64 of the
/// title with leading/trailing ASCII whitespace removed, as 16 lowercase hex
/// digits.
std::string title_hash(std::string_view title);

}  // namespace finsent
