#pragma once

#include <array>
#include <charconv>
#include <string>

namespace penphase {

/// Shortest-unambiguous is not what we want for reproducible files: every real
/// is written with 17 significant digits so text round-trips bit-exactly.
inline std::string format_real(double value) {
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace penphase
