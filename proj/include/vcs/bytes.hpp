#pragma once

// Byte-level helpers shared by the storage formats: hex, LEB128 varints,
// big-endian fixed-width integers, zlib streams, SHA-1 and file I/O.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace vcs {

using Digest = std::array<std::uint8_t, 20>;

Digest sha1(std::string_view data);

std::string to_hex(std::string_view raw);
std::optional<std::string> from_hex(std::string_view hex);
bool is_hex(std::string_view text);

void put_varint(std::string& out, std::uint64_t value);
// Advances `pos`; returns nullopt on truncation or overflow.
std::optional<std::uint64_t> get_varint(std::string_view in, std::size_t& pos);

void put_u32be(std::string& out, std::uint32_t value);
void put_u64be(std::string& out, std::uint64_t value);
std::uint32_t get_u32be(std::string_view in, std::size_t pos);
std::uint64_t get_u64be(std::string_view in, std::size_t pos);

std::string zlib_compress(std::string_view data);
std::optional<std::string> zlib_decompress(std::string_view data);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);
void append_file(const std::filesystem::path& path, std::string_view data);

// Exclusive advisory lock implemented as an O_EXCL lock file. Throws
// Errc::LockHeld when another holder exists.
class LockFile {
 public:
  explicit LockFile(std::filesystem::path path);
  ~LockFile();
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace vcs
