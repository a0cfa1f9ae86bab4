#pragma once

// Immutable packs of zlib-compressed objects, some stored as deltas.
//
// Pack file:  "VPAK" u8 version, 3 zero bytes, u32be entry count, entries,
//             20-byte SHA-1 of everything before it.
// Entry:      u8 type (1 commit, 2 tree, 3 blob, 4 delta), varint size of
//             the uncompressed payload, [20-byte base id if delta],
//             varint compressed length, zlib payload. A delta payload is an
//             encoded bindelta against the base object.
// Index file: "VIDX" u8 version, 3 zero bytes, 256 cumulative u32be fanout
//             counts by first id byte, records (20-byte id, u64be offset)
//             sorted by id, 20-byte pack checksum, 20-byte SHA-1 of the
//             index bytes before it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/loose_store.hpp"
#include "vcs/object.hpp"

namespace vcs {

inline constexpr std::size_t kDefaultPackWindow = 10;
inline constexpr std::size_t kDefaultPackDepth = 10;

struct PackObject {
  ObjectId id;
  ObjectKind kind = ObjectKind::Blob;
  std::string payload;
  std::string path;  // path the object was first reached through
};

// Indices into `objects` in delta-candidate order: grouped by kind (commits,
// trees, blobs). Blobs sort by reversed path bytes, then size descending,
// then id; commits and trees by size descending, then id.
std::vector<std::size_t> delta_candidate_order(std::span<const PackObject> objects);

// Breadth-first walk from `heads` (commit ids) through parents and trees.
// Throws DanglingReference when `fetch` cannot supply a referenced object.
using ObjectFetcher = std::function<std::optional<StoredObject>(const ObjectId&)>;
std::vector<PackObject> collect_reachable(std::span<const ObjectId> heads, const ObjectFetcher& fetch);

struct PackBuildResult {
  std::string pack;
  std::string index;
  std::string checksum_hex;  // SHA-1 trailer of the pack
  std::size_t delta_count = 0;
  std::size_t max_depth = 0;
};

// `objects` are written in the given order, except that a delta's base is
// always written before the delta. Throws DanglingReference when a tree or
// commit refers to an id outside `objects`.
PackBuildResult build_pack(std::span<const PackObject> objects, std::size_t window = kDefaultPackWindow,
                           std::size_t max_depth = kDefaultPackDepth);

struct PackEntryInfo {
  ObjectId id;
  std::uint64_t offset = 0;
  std::uint8_t type = 0;
  std::optional<ObjectId> base;
  std::size_t depth = 0;
};

class PackReader {
 public:
  // Throws CorruptPack on bad headers or checksums.
  static PackReader open(const std::filesystem::path& pack_path, const std::filesystem::path& index_path);
  static PackReader from_bytes(std::string pack, std::string index, bool verify_checksums = true);

  bool contains(const ObjectId& id) const { return lookup(id).has_value(); }
  std::optional<std::uint64_t> lookup(const ObjectId& id) const;
  // Throws UnknownObject or CorruptPack.
  StoredObject read(const ObjectId& id) const;
  std::vector<ObjectId> ids() const;
  std::vector<PackEntryInfo> entries() const;
  std::size_t size() const { return count_; }

 private:
  std::string pack_;
  std::string index_;
  std::size_t count_ = 0;

  struct RawEntry {
    std::uint8_t type;
    std::uint64_t size;
    std::optional<ObjectId> base;
    std::string payload;
  };
  RawEntry parse_entry(std::uint64_t offset) const;
  ObjectId record_id(std::size_t i) const;
  std::uint64_t record_offset(std::size_t i) const;
};

// Writes packs/pack-<checksum>.{pack,idx} atomically; returns the pack path.
std::filesystem::path write_pack(const std::filesystem::path& packs_dir, const PackBuildResult& built);

}  // namespace vcs
