#include "vcs/bytes.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <openssl/sha.h>
#include <zlib.h>

#include <atomic>
#include <cerrno>
#include <fstream>
#include <sstream>

#include "vcs/error.hpp"

namespace vcs {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::CorruptObject: return "CorruptObject";
    case Errc::MalformedObject: return "MalformedObject";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::ScriptMismatch: return "ScriptMismatch";
    case Errc::BaseLengthMismatch: return "BaseLengthMismatch";
    case Errc::CopyOutOfRange: return "CopyOutOfRange";
    case Errc::TargetLengthMismatch: return "TargetLengthMismatch";
    case Errc::ChainMismatch: return "ChainMismatch";
    case Errc::MalformedDelta: return "MalformedDelta";
    case Errc::DuplicateRevision: return "DuplicateRevision";
    case Errc::UnknownParent: return "UnknownParent";
    case Errc::UnknownRevision: return "UnknownRevision";
    case Errc::MalformedWeave: return "MalformedWeave";
    case Errc::LockHeld: return "LockHeld";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::CorruptHunk: return "CorruptHunk";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::CorruptPack: return "CorruptPack";
    case Errc::UnknownCommit: return "UnknownCommit";
    case Errc::EmptyResult: return "EmptyResult";
    case Errc::UnrelatedHistories: return "UnrelatedHistories";
    case Errc::NoMarks: return "NoMarks";
    case Errc::HunkFailed: return "HunkFailed";
    case Errc::MalformedPatch: return "MalformedPatch";
    case Errc::NotARepository: return "NotARepository";
    case Errc::DirtyTree: return "DirtyTree";
    case Errc::UnknownRef: return "UnknownRef";
    case Errc::ConflictsPending: return "ConflictsPending";
    case Errc::NonFastForwardPush: return "NonFastForwardPush";
    case Errc::UnknownRemote: return "UnknownRemote";
  }
  return "Unknown";
}

Digest sha1(std::string_view data) {
  Digest out{};
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data());
  return out;
}

std::string to_hex(std::string_view raw) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char c : raw) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

bool is_hex(std::string_view text) {
  for (char c : text)
    if (hex_value(c) < 0) return false;
  return true;
}

std::optional<std::string> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0 || !is_hex(hex)) return std::nullopt;
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<char>(hex_value(hex[2 * i]) << 4 | hex_value(hex[2 * i + 1]));
  return out;
}

void put_varint(std::string& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<char>((value & 0x7f) | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<char>(value));
}

std::optional<std::uint64_t> get_varint(std::string_view in, std::size_t& pos) {
  std::uint64_t value = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) return std::nullopt;
    auto byte = static_cast<std::uint8_t>(in[pos++]);
    value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) return value;
  }
  return std::nullopt;
}

void put_u32be(std::string& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>(value >> shift));
}

void put_u64be(std::string& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>(value >> shift));
}

std::uint32_t get_u32be(std::string_view in, std::size_t pos) {
  std::uint32_t value = 0;
  for (std::size_t i = 0; i < 4; ++i) value = value << 8 | static_cast<std::uint8_t>(in[pos + i]);
  return value;
}

std::uint64_t get_u64be(std::string_view in, std::size_t pos) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < 8; ++i) value = value << 8 | static_cast<std::uint8_t>(in[pos + i]);
  return value;
}

std::string zlib_compress(std::string_view data) {
  uLongf bound = compressBound(static_cast<uLong>(data.size()));
  std::string out(bound, '\0');
  int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                     reinterpret_cast<const Bytef*>(data.data()), static_cast<uLong>(data.size()),
                     Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw Error(Errc::Io, "zlib compression failed");
  out.resize(bound);
  return out;
}

std::optional<std::string> zlib_decompress(std::string_view data) {
  z_stream stream{};
  if (inflateInit(&stream) != Z_OK) return std::nullopt;
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  stream.avail_in = static_cast<uInt>(data.size());

  std::string out;
  char buffer[16384];
  int rc = Z_OK;
  while (rc == Z_OK) {
    stream.next_out = reinterpret_cast<Bytef*>(buffer);
    stream.avail_out = sizeof(buffer);
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) break;
    out.append(buffer, sizeof(buffer) - stream.avail_out);
  }
  bool consumed_all = stream.avail_in == 0;
  inflateEnd(&stream);
  if (rc != Z_STREAM_END || !consumed_all) return std::nullopt;
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(Errc::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename onto " + path.string());
  }
}

void append_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::Io, "cannot append to " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(Errc::Io, "short append to " + path.string());
}

LockFile::LockFile(std::filesystem::path path) : path_(std::move(path)) {
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) throw Error(Errc::LockHeld, path_.string());
    throw Error(Errc::Io, "cannot create lock " + path_.string());
  }
  ::close(fd);
}

LockFile::~LockFile() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

}  // namespace vcs
