#include "bwt/key.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bwt/errors.hpp"

namespace bwt {

std::string_view kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Shuffle: return "shuffle";
    case TransformKind::Flip: return "flip";
    case TransformKind::Ffx: return "ffx";
  }
  return "?";
}

TransformKind kind_from_name(std::string_view name) {
  if (name == "shuffle") return TransformKind::Shuffle;
  if (name == "flip") return TransformKind::Flip;
  if (name == "ffx") return TransformKind::Ffx;
  throw FormatError("unknown transform kind: " + std::string(name));
}

std::string serialize_key(const DefenseKey& key) {
  std::ostringstream os;
  os << "kind=" << kind_name(key.kind) << "\n";
  os << "seed=" << key.seed << "\n";
  os << "block=" << key.block_size << "\n";
  if (key.kind == TransformKind::Ffx) os << "password=" << key.password << "\n";
  return os.str();
}

DefenseKey parse_key(std::string_view text) {
  DefenseKey key;
  bool saw_kind = false, saw_seed = false, saw_block = false, saw_pw = false;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    ++lineno;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("key file line " + std::to_string(lineno) +
                        ": expected key=value");
    }
    const std::string_view k = line.substr(0, eq);
    const std::string_view v = line.substr(eq + 1);
    if (k == "kind") {
      key.kind = kind_from_name(v);
      saw_kind = true;
    } else if (k == "seed") {
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), key.seed);
      if (ec != std::errc() || p != v.data() + v.size())
        throw FormatError("key file: bad seed value");
      saw_seed = true;
    } else if (k == "block") {
      auto [p, ec] =
          std::from_chars(v.data(), v.data() + v.size(), key.block_size);
      if (ec != std::errc() || p != v.data() + v.size() || key.block_size < 1)
        throw FormatError("key file: bad block value");
      saw_block = true;
    } else if (k == "password") {
      key.password = std::string(v);
      saw_pw = true;
    } else {
      throw FormatError("key file: unknown field '" + std::string(k) + "'");
    }
  }
  if (!saw_kind || !saw_seed || !saw_block)
    throw FormatError("key file: kind, seed and block are required");
  if (key.kind == TransformKind::Ffx && !saw_pw)
    throw FormatError("key file: ffx kind requires a password");
  if (key.kind != TransformKind::Ffx && saw_pw)
    throw FormatError("key file: password only valid for ffx kind");
  return key;
}

DefenseKey load_key_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open key file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key(buf.str());
}

void save_key_file(const DefenseKey& key, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write key file: " + path);
  out << serialize_key(key);
}

}  // namespace bwt
