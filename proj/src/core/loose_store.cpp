#include "vcs/loose_store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"

namespace vcs {

namespace fs = std::filesystem;

void validate_prefix(std::string_view hex_prefix) {
  if (hex_prefix.size() < 4 || hex_prefix.size() > ObjectId::kHexSize || !is_hex(hex_prefix))
    throw Error(Errc::InvalidArgument,
                "object prefix must be 4..40 hex digits: '" + std::string(hex_prefix) + "'");
}

ObjectId resolve_prefix(std::span<const ObjectId> ids, std::string_view hex_prefix) {
  validate_prefix(hex_prefix);
  std::string prefix(hex_prefix);
  std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::vector<ObjectId> matches;
  for (const auto& id : ids)
    if (id.hex().starts_with(prefix)) matches.push_back(id);
  std::sort(matches.begin(), matches.end());
  matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
  if (matches.empty()) throw Error(Errc::UnknownObject, prefix);
  if (matches.size() > 1)
    throw Error(Errc::Ambiguous, prefix + " matches " + std::to_string(matches.size()) + " objects");
  return matches.front();
}

LooseStore::LooseStore(fs::path objects_dir) : root_(std::move(objects_dir)) {
  fs::create_directories(root_);
}

fs::path LooseStore::path_for(const ObjectId& id) const {
  auto hex = id.hex();
  return root_ / hex.substr(0, 2) / hex.substr(2);
}

ObjectId LooseStore::put(ObjectKind kind, std::string_view payload) {
  auto id = hash_object(kind, payload);
  auto path = path_for(id);
  if (fs::exists(path)) return id;
  fs::create_directories(path.parent_path());
  std::string framed = object_header(kind, payload.size());
  framed.append(payload);
  write_file_atomic(path, zlib_compress(framed));
  return id;
}

std::optional<StoredObject> LooseStore::try_get(const ObjectId& id) const {
  auto path = path_for(id);
  if (!fs::exists(path)) return std::nullopt;
  auto corrupt = [&](const char* why) {
    return Error(Errc::CorruptObject, id.hex() + ": " + why);
  };

  auto framed = zlib_decompress(read_file(path));
  if (!framed) throw corrupt("not a valid compressed stream");
  auto nul = framed->find('\0');
  if (nul == std::string::npos) throw corrupt("missing header");
  std::string_view header(framed->data(), nul);
  auto space = header.find(' ');
  if (space == std::string_view::npos) throw corrupt("bad header");
  auto kind = kind_from_name(header.substr(0, space));
  std::size_t length = 0;
  auto len_text = header.substr(space + 1);
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
  if (!kind || ec != std::errc() || ptr != len_text.data() + len_text.size() ||
      length != framed->size() - nul - 1)
    throw corrupt("bad header");
  if (ObjectId(sha1(*framed)) != id) throw corrupt("content does not match id");
  return StoredObject{*kind, framed->substr(nul + 1)};
}

StoredObject LooseStore::get(const ObjectId& id) const {
  auto obj = try_get(id);
  if (!obj) throw Error(Errc::UnknownObject, id.hex());
  return std::move(*obj);
}

bool LooseStore::contains(const ObjectId& id) const { return fs::exists(path_for(id)); }

void LooseStore::remove(const ObjectId& id) {
  auto path = path_for(id);
  fs::remove(path);
  std::error_code ec;
  if (fs::is_empty(path.parent_path(), ec)) fs::remove(path.parent_path(), ec);
}

std::vector<ObjectId> LooseStore::list() const {
  std::vector<ObjectId> ids;
  if (!fs::exists(root_)) return ids;
  for (const auto& dir : fs::directory_iterator(root_)) {
    auto prefix = dir.path().filename().string();
    if (!dir.is_directory() || prefix.size() != 2 || !is_hex(prefix)) continue;
    for (const auto& file : fs::directory_iterator(dir.path())) {
      if (auto id = ObjectId::from_hex(prefix + file.path().filename().string())) ids.push_back(*id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ObjectId LooseStore::resolve_prefix(std::string_view hex_prefix) const {
  validate_prefix(hex_prefix);
  std::vector<ObjectId> ids;
  std::string first_two(hex_prefix.substr(0, 2));
  for (auto& c : first_two) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto dir = root_ / first_two;
  if (fs::exists(dir)) {
    for (const auto& file : fs::directory_iterator(dir)) {
      if (auto id = ObjectId::from_hex(dir.filename().string() + file.path().filename().string()))
        ids.push_back(*id);
    }
  }
  return vcs::resolve_prefix(ids, hex_prefix);
}

}  // namespace vcs
