#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace bwt {

/// Format-preserving encryption of 3-decimal-digit integers.
///
/// The domain {0..999} is embedded in 10 bits (5-bit halves) and run through
/// 8 balanced Feistel rounds. Round function: the first 4 bytes of
/// HMAC-SHA-256(key = password, message = [round, half]) as a big-endian
/// 32-bit integer, reduced mod 32. Outputs >= 1000 are cycle-walked.
int enc3(int n, std::string_view password);

/// Exact inverse of enc3.
int dec3(int m, std::string_view password);

/// 256-entry table: enc[n] = enc3(n, P) for pixel values, plus the inverse
/// map and the fixed rescaling divisor max(enc) u {255}.
struct FpeLookup {
  std::array<int, 256> enc{};
  std::array<int, 1000> dec{};  // -1 where no preimage in 0..255
  std::string password;
  int divisor = 255;

  bool in_image(int m) const { return m >= 0 && m < 1000 && dec[m] >= 0; }
};

FpeLookup build_lookup(std::string_view password);

}  // namespace bwt
