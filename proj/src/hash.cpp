#include "finsent/hash.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "finsent/csv.hpp"

namespace finsent {

std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t state) {
  for (int i = 0; i < 8; ++i) {
    state ^= (value >> (8 * i)) & 0xffU;
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t fnv1a64_doubles(std::span<const double> values, std::uint64_t state) {
  for (double v : values) state = fnv1a64_u64(std::bit_cast<std::uint64_t>(v), state);
  return state;
}

std::string to_hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string title_hash(std::string_view title) {
  return to_hex16(fnv1a64(csv::trim(title)));
}

}  // namespace finsent
