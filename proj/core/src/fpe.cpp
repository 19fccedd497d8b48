#include "bwt/fpe.hpp"

#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cassert>
#include <stdexcept>

#include "bwt/errors.hpp"

namespace bwt {

namespace {

constexpr int kRounds = 8;
constexpr int kHalfBits = 5;
constexpr int kHalfMask = (1 << kHalfBits) - 1;  // 31
constexpr int kDomain = 1000;
constexpr int kWalkLimit = 1024;  // Feistel permutes {0..1023}; a cycle must
                                  // re-enter the domain within its length

// First 4 bytes of HMAC-SHA-256(password, [round, half]) as big-endian u32.
std::uint32_t round_func(std::string_view password, int round, int half) {
  unsigned char msg[2] = {static_cast<unsigned char>(round),
                          static_cast<unsigned char>(half)};
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  if (HMAC(EVP_sha256(), password.data(), static_cast<int>(password.size()),
           msg, sizeof(msg), mac, &mac_len) == nullptr ||
      mac_len < 4) {
    throw Error("HMAC-SHA-256 failed");
  }
  return (static_cast<std::uint32_t>(mac[0]) << 24) |
         (static_cast<std::uint32_t>(mac[1]) << 16) |
         (static_cast<std::uint32_t>(mac[2]) << 8) |
         static_cast<std::uint32_t>(mac[3]);
}

int feistel_forward(int n, std::string_view password) {
  int left = n >> kHalfBits;
  int right = n & kHalfMask;
  for (int i = 0; i < kRounds; ++i) {
    const int f = static_cast<int>(round_func(password, i, right)) & kHalfMask;
    const int new_right = left ^ f;
    left = right;
    right = new_right;
  }
  return (left << kHalfBits) | right;
}

int feistel_backward(int m, std::string_view password) {
  int left = m >> kHalfBits;
  int right = m & kHalfMask;
  for (int i = kRounds - 1; i >= 0; --i) {
    const int f = static_cast<int>(round_func(password, i, left)) & kHalfMask;
    const int old_left = right ^ f;
    right = left;
    left = old_left;
  }
  return (left << kHalfBits) | right;
}

}  // namespace

int enc3(int n, std::string_view password) {
  if (n < 0 || n >= kDomain) throw Error("enc3: input outside 0..999");
  int m = feistel_forward(n, password);
  int steps = 0;
  while (m >= kDomain) {
    m = feistel_forward(m, password);
    if (++steps > kWalkLimit) throw Error("enc3: cycle walk did not terminate");
  }
  return m;
}

int dec3(int m, std::string_view password) {
  if (m < 0 || m >= kDomain) throw Error("dec3: input outside 0..999");
  int n = feistel_backward(m, password);
  int steps = 0;
  while (n >= kDomain) {
    n = feistel_backward(n, password);
    if (++steps > kWalkLimit) throw Error("dec3: cycle walk did not terminate");
  }
  return n;
}

FpeLookup build_lookup(std::string_view password) {
  FpeLookup table;
  table.password = std::string(password);
  table.dec.fill(-1);
  int max_enc = 255;
  for (int n = 0; n < 256; ++n) {
    const int e = enc3(n, password);
    table.enc[n] = e;
    table.dec[e] = n;
    if (e > max_enc) max_enc = e;
  }
  table.divisor = max_enc;
  return table;
}

}  // namespace bwt
