#pragma once

// Append-only per-file revision log.
//
// <name>.d holds hunks back to back; <name>.i holds an 8-byte header
// ("VRLG", version, 3 zero bytes) followed by fixed 84-byte big-endian
// records:
//   u64 data_offset, u32 data_len, u32 full_len, u32 base_seq,
//   u8 kind (0 full, 1 delta), 3 zero bytes,
//   20-byte content id, 20-byte parent 1, 20-byte parent 2 (zero = none).
// A hunk is empty for empty text, otherwise 'z' + zlib stream or 'u' + raw
// bytes, whichever is shorter. Delta hunks encode a bindelta against the
// previously appended revision.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/object.hpp"

namespace vcs {

enum class HunkKind : std::uint8_t { Full = 0, Delta = 1 };

struct RevlogEntry {
  std::uint32_t seq = 0;
  std::uint64_t data_offset = 0;
  std::uint32_t data_len = 0;
  std::uint32_t full_len = 0;
  std::uint32_t base_seq = 0;
  HunkKind kind = HunkKind::Full;
  ObjectId linked_id;
  ObjectId p1;
  ObjectId p2;

  bool operator==(const RevlogEntry&) const = default;
};

inline constexpr double kDefaultChainCap = 2.0;
inline constexpr std::size_t kRevlogHeaderSize = 8;
inline constexpr std::size_t kRevlogRecordSize = 84;

struct AppendResult {
  std::uint32_t seq;
  bool added;  // false when the content was already present
};

class Revlog {
 public:
  // Opens (without modifying) the log `dir/name`. Only index records whose
  // data lies inside the data file are visible.
  Revlog(std::filesystem::path dir, std::string name, double chain_cap = kDefaultChainCap);

  std::filesystem::path index_path() const;
  std::filesystem::path data_path() const;
  std::filesystem::path lock_path() const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<RevlogEntry>& entries() const { return entries_; }
  const RevlogEntry& entry(std::uint32_t seq) const;
  std::optional<std::uint32_t> find(const ObjectId& content_id) const;

  // Takes the writer lock (Errc::LockHeld), recovers, then appends the data
  // hunk followed by its index record.
  AppendResult append(std::string_view content, const ObjectId& p1 = {}, const ObjectId& p2 = {});

  // One contiguous read of hunks base_seq..seq, combined and applied once.
  // Throws OutOfRange or CorruptHunk.
  std::string read(std::uint32_t seq) const;

  // Sum of on-disk hunk sizes from the entry's base through the entry.
  std::uint64_t chain_size(std::uint32_t seq) const;

  // Drops torn index records and records whose data is missing, truncates
  // both files to the surviving prefix and returns its length. Callers must
  // hold the writer lock.
  std::size_t recover();

  void reload();

 private:
  std::filesystem::path dir_;
  std::string name_;
  double chain_cap_;
  std::vector<RevlogEntry> entries_;

  std::uint64_t data_end() const;
};

// Encodes/decodes a single index record (exposed for tests and tools).
std::string encode_revlog_record(const RevlogEntry& entry);
RevlogEntry decode_revlog_record(std::string_view bytes, std::uint32_t seq);

}  // namespace vcs
