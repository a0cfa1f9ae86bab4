#include <algorithm>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"
#include "vcs/histdag.hpp"

namespace vcs {

namespace fs = std::filesystem;

RefStore::RefStore(fs::path root) : root_(std::move(root)) {}

bool RefStore::valid_name(std::string_view name) {
  if (name.empty() || name.front() == '/' || name.back() == '/') return false;
  std::size_t pos = 0;
  while (pos <= name.size()) {
    std::size_t end = name.find('/', pos);
    if (end == std::string_view::npos) end = name.size();
    std::string_view part = name.substr(pos, end - pos);
    if (part.empty() || part == "." || part == ".." || part.back() == '~' ||
        part.find(".lock") != std::string_view::npos || part.find(".tmp") != std::string_view::npos)
      return false;
    if (std::any_of(part.begin(), part.end(), [](char c) {
          return static_cast<unsigned char>(c) < 0x21 || c == 0x7f || c == ':' || c == '\\' || c == '*' ||
                 c == '?' || c == '[';
        }))
      return false;
    pos = end + 1;
  }
  return true;
}

fs::path RefStore::path_for(std::string_view name) const {
  if (!valid_name(name)) throw Error(Errc::InvalidArgument, "invalid ref name '" + std::string(name) + "'");
  return root_ / std::string(name);
}

std::optional<ObjectId> RefStore::get(std::string_view name) const {
  auto path = path_for(name);
  if (!fs::is_regular_file(path)) return std::nullopt;
  std::string text = read_file(path);
  if (text.size() != ObjectId::kHexSize + 1 || text.back() != '\n')
    throw Error(Errc::CorruptObject, "ref " + std::string(name) + " is malformed");
  auto id = ObjectId::from_hex(std::string_view(text).substr(0, ObjectId::kHexSize));
  if (!id) throw Error(Errc::CorruptObject, "ref " + std::string(name) + " is malformed");
  return id;
}

ObjectId RefStore::resolve(std::string_view name) const {
  auto id = get(name);
  if (!id) throw Error(Errc::UnknownRef, std::string(name));
  return *id;
}

bool RefStore::exists(std::string_view name) const { return fs::is_regular_file(path_for(name)); }

void RefStore::set(std::string_view name, const ObjectId& id) {
  auto path = path_for(name);
  fs::create_directories(path.parent_path());
  write_file_atomic(path, id.hex() + "\n");
}

void RefStore::remove(std::string_view name) {
  auto path = path_for(name);
  if (!fs::is_regular_file(path)) throw Error(Errc::UnknownRef, std::string(name));
  fs::remove(path);
}

std::map<std::string, ObjectId> RefStore::list() const {
  std::map<std::string, ObjectId> out;
  if (!fs::exists(root_)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (!entry.is_regular_file()) continue;
    std::string name = fs::relative(entry.path(), root_).generic_string();
    if (!valid_name(name)) continue;  // temporaries from atomic writes
    if (auto id = get(name)) out.emplace(name, *id);
  }
  return out;
}

}  // namespace vcs
