#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcs/object.hpp"

namespace vcs {

struct StoredObject {
  ObjectKind kind;
  std::string payload;

  bool operator==(const StoredObject&) const = default;
};

// Picks the unique id starting with `hex_prefix` among `ids`. Requires at
// least 4 hex digits; throws Ambiguous or UnknownObject.
ObjectId resolve_prefix(std::span<const ObjectId> ids, std::string_view hex_prefix);
void validate_prefix(std::string_view hex_prefix);

// One zlib-compressed file per object at objects/<2 hex>/<38 hex>.
class LooseStore {
 public:
  explicit LooseStore(std::filesystem::path objects_dir);

  ObjectId put(ObjectKind kind, std::string_view payload);
  // Throws UnknownObject, or CorruptObject when the stored bytes do not
  // decode and re-hash to `id`.
  StoredObject get(const ObjectId& id) const;
  std::optional<StoredObject> try_get(const ObjectId& id) const;
  bool contains(const ObjectId& id) const;
  void remove(const ObjectId& id);

  std::vector<ObjectId> list() const;
  ObjectId resolve_prefix(std::string_view hex_prefix) const;

  std::filesystem::path path_for(const ObjectId& id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace vcs
