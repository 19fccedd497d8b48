#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bwt {

enum class TransformKind { Shuffle, Flip, Ffx };

std::string_view kind_name(TransformKind kind);
TransformKind kind_from_name(std::string_view name);  // throws FormatError

/// Secret material for one defensive transformation.
struct DefenseKey {
  TransformKind kind = TransformKind::Shuffle;
  std::uint64_t seed = 0;
  int block_size = 4;
  std::string password;  // FFX only
};

/// `key=value` per line, LF: kind=, seed=, block=, password= (ffx only).
std::string serialize_key(const DefenseKey& key);
DefenseKey parse_key(std::string_view text);  // throws FormatError

DefenseKey load_key_file(const std::string& path);
void save_key_file(const DefenseKey& key, const std::string& path);

}  // namespace bwt
