#pragma once

// Content-addressed object model: blobs, per-directory trees and commits.
//
// Every object is identified by the SHA-1 of "<kind> <length>\0<payload>",
// where payload is the canonical serialization below. Because trees embed
// child ids and commits embed tree and parent ids, an edit to any blob
// changes the id of every tree on its path and of the commit.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vcs {

class ObjectId {
 public:
  static constexpr std::size_t kSize = 20;
  static constexpr std::size_t kHexSize = 2 * kSize;

  ObjectId() = default;
  explicit ObjectId(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}

  // `raw` must be exactly kSize bytes.
  static std::optional<ObjectId> from_raw(std::string_view raw);
  static std::optional<ObjectId> from_hex(std::string_view hex);

  std::string hex() const;
  std::string short_hex(std::size_t digits = 7) const { return hex().substr(0, digits); }
  std::string_view raw() const {
    return {reinterpret_cast<const char*>(bytes_.data()), bytes_.size()};
  }
  bool is_zero() const;

  auto operator<=>(const ObjectId&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

enum class ObjectKind : std::uint8_t { Blob = 1, Tree = 2, Commit = 3 };

std::string_view kind_name(ObjectKind kind);
std::optional<ObjectKind> kind_from_name(std::string_view name);

// Loose/pack framing header "<kind> <length>\0".
std::string object_header(ObjectKind kind, std::size_t length);
ObjectId hash_object(ObjectKind kind, std::string_view payload);

enum class FileMode : std::uint8_t { Normal, Executable };

struct TreeEntry {
  std::string name;
  FileMode mode = FileMode::Normal;
  ObjectId id;
  ObjectKind kind = ObjectKind::Blob;

  bool operator==(const TreeEntry&) const = default;
};

struct Tree {
  // Sorted by name (byte order), unique, names free of '/' and NUL.
  std::vector<TreeEntry> entries;

  const TreeEntry* find(std::string_view name) const;
  bool operator==(const Tree&) const = default;
};

struct Commit {
  ObjectId tree;
  std::vector<ObjectId> parents;
  std::string author;
  std::int64_t timestamp = 0;
  std::string message;

  // First line of the message.
  std::string subject() const;
  bool operator==(const Commit&) const = default;
};

// Serializers validate their input and throw Errc::MalformedObject.
std::string serialize_tree(const Tree& tree);
std::string serialize_commit(const Commit& commit);

// Parsers accept only canonical encodings, so serialize(parse(b)) == b.
Tree parse_tree(std::string_view payload);
Commit parse_commit(std::string_view payload);

// Builds a tree with entries sorted into canonical order.
Tree make_tree(std::vector<TreeEntry> entries);

}  // namespace vcs

template <>
struct std::hash<vcs::ObjectId> {
  std::size_t operator()(const vcs::ObjectId& id) const noexcept {
    std::size_t h = 0;
    auto raw = id.raw();
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i)
      h = h << 8 | static_cast<std::uint8_t>(raw[i]);
    return h;
  }
};
