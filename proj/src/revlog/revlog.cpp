#include "vcs/revlog.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "vcs/bindelta.hpp"
#include "vcs/bytes.hpp"
#include "vcs/error.hpp"

namespace vcs {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "VRLG";
constexpr std::uint8_t kVersion = 1;

std::string index_header() {
  std::string h(kMagic);
  h.push_back(static_cast<char>(kVersion));
  h.append(3, '\0');
  return h;
}

std::string encode_hunk(std::string_view payload) {
  if (payload.empty()) return {};
  std::string z = "z" + zlib_compress(payload);
  if (z.size() < payload.size() + 1) return z;
  return "u" + std::string(payload);
}

std::optional<std::string> decode_hunk(std::string_view hunk) {
  if (hunk.empty()) return std::string();
  if (hunk[0] == 'u') return std::string(hunk.substr(1));
  if (hunk[0] == 'z') return zlib_decompress(hunk.substr(1));
  return std::nullopt;
}

void write_all_synced(const fs::path& path, std::string_view data, bool append) {
  int flags = O_WRONLY | O_CREAT | (append ? O_APPEND : O_TRUNC);
  int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) throw Error(Errc::Io, "open " + path.string() + ": " + std::strerror(errno));
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(Errc::Io, "write " + path.string() + ": " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

std::uint64_t file_size_or_zero(const fs::path& path) {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  return ec ? 0 : size;
}

}  // namespace

std::string encode_revlog_record(const RevlogEntry& e) {
  std::string out;
  put_u64be(out, e.data_offset);
  put_u32be(out, e.data_len);
  put_u32be(out, e.full_len);
  put_u32be(out, e.base_seq);
  out.push_back(static_cast<char>(e.kind));
  out.append(3, '\0');
  out.append(e.linked_id.raw());
  out.append(e.p1.raw());
  out.append(e.p2.raw());
  return out;
}

RevlogEntry decode_revlog_record(std::string_view b, std::uint32_t seq) {
  if (b.size() != kRevlogRecordSize) throw Error(Errc::CorruptHunk, "short index record");
  RevlogEntry e;
  e.seq = seq;
  e.data_offset = get_u64be(b, 0);
  e.data_len = get_u32be(b, 8);
  e.full_len = get_u32be(b, 12);
  e.base_seq = get_u32be(b, 16);
  auto kind = static_cast<std::uint8_t>(b[20]);
  if (kind > 1 || b[21] != 0 || b[22] != 0 || b[23] != 0) throw Error(Errc::CorruptHunk, "bad record kind");
  e.kind = static_cast<HunkKind>(kind);
  e.linked_id = *ObjectId::from_raw(b.substr(24, 20));
  e.p1 = *ObjectId::from_raw(b.substr(44, 20));
  e.p2 = *ObjectId::from_raw(b.substr(64, 20));
  return e;
}

Revlog::Revlog(fs::path dir, std::string name, double chain_cap)
    : dir_(std::move(dir)), name_(std::move(name)), chain_cap_(chain_cap) {
  if (name_.empty() || name_.find('/') != std::string::npos)
    throw Error(Errc::InvalidArgument, "bad revlog name '" + name_ + "'");
  reload();
}

fs::path Revlog::index_path() const { return dir_ / (name_ + ".i"); }
fs::path Revlog::data_path() const { return dir_ / (name_ + ".d"); }
fs::path Revlog::lock_path() const { return dir_ / (name_ + ".lock"); }

void Revlog::reload() {
  entries_.clear();
  if (!fs::exists(index_path())) return;
  std::string index = read_file(index_path());
  if (index.size() < kRevlogHeaderSize) return;
  if (index.compare(0, kRevlogHeaderSize, index_header()) != 0)
    throw Error(Errc::CorruptHunk, index_path().string() + ": bad header");
  std::uint64_t data_size = file_size_or_zero(data_path());
  std::uint64_t expected_offset = 0;
  std::size_t count = (index.size() - kRevlogHeaderSize) / kRevlogRecordSize;
  for (std::size_t i = 0; i < count; ++i) {
    RevlogEntry e;
    try {
      e = decode_revlog_record(
          std::string_view(index).substr(kRevlogHeaderSize + i * kRevlogRecordSize, kRevlogRecordSize),
          static_cast<std::uint32_t>(i));
    } catch (const Error&) {
      break;
    }
    bool sane = e.data_offset == expected_offset && e.data_offset + e.data_len <= data_size &&
                e.base_seq <= i && (e.kind == HunkKind::Full) == (e.base_seq == i);
    if (!sane) break;
    expected_offset += e.data_len;
    entries_.push_back(e);
  }
}

std::uint64_t Revlog::data_end() const {
  if (entries_.empty()) return 0;
  return entries_.back().data_offset + entries_.back().data_len;
}

std::size_t Revlog::recover() {
  reload();
  fs::create_directories(dir_);
  std::string header = index_header();
  std::uint64_t index_len = kRevlogHeaderSize + entries_.size() * kRevlogRecordSize;
  if (file_size_or_zero(index_path()) < kRevlogHeaderSize) {
    write_all_synced(index_path(), header, false);
  }
  if (file_size_or_zero(index_path()) != index_len) fs::resize_file(index_path(), index_len);
  if (!fs::exists(data_path())) write_all_synced(data_path(), "", false);
  if (file_size_or_zero(data_path()) != data_end()) fs::resize_file(data_path(), data_end());
  return entries_.size();
}

const RevlogEntry& Revlog::entry(std::uint32_t seq) const {
  if (seq >= entries_.size())
    throw Error(Errc::OutOfRange, name_ + ": no revision " + std::to_string(seq));
  return entries_[seq];
}

std::optional<std::uint32_t> Revlog::find(const ObjectId& content_id) const {
  for (const auto& e : entries_)
    if (e.linked_id == content_id) return e.seq;
  return std::nullopt;
}

std::uint64_t Revlog::chain_size(std::uint32_t seq) const {
  const auto& target = entry(seq);
  std::uint64_t total = 0;
  for (std::uint32_t s = target.base_seq; s <= seq; ++s) total += entries_[s].data_len;
  return total;
}

AppendResult Revlog::append(std::string_view content, const ObjectId& p1, const ObjectId& p2) {
  fs::create_directories(dir_);
  LockFile lock(lock_path());
  recover();

  ObjectId id = hash_object(ObjectKind::Blob, content);
  if (auto existing = find(id)) return {*existing, false};
  if (content.size() > UINT32_MAX) throw Error(Errc::InvalidArgument, "revision too large for revlog");

  RevlogEntry e;
  e.seq = static_cast<std::uint32_t>(entries_.size());
  e.data_offset = data_end();
  e.full_len = static_cast<std::uint32_t>(content.size());
  e.linked_id = id;
  e.p1 = p1;
  e.p2 = p2;

  std::string hunk;
  bool stored_as_delta = false;
  if (!entries_.empty()) {
    const RevlogEntry& prev = entries_.back();
    std::string delta_hunk = encode_hunk(encode_delta(xdelta_make(read(prev.seq), content)));
    std::uint64_t chain = chain_size(prev.seq) + delta_hunk.size();
    if (static_cast<double>(chain) <= chain_cap_ * static_cast<double>(content.size())) {
      hunk = std::move(delta_hunk);
      e.kind = HunkKind::Delta;
      e.base_seq = prev.base_seq;
      stored_as_delta = true;
    }
  }
  if (!stored_as_delta) {
    hunk = encode_hunk(content);
    e.kind = HunkKind::Full;
    e.base_seq = e.seq;
  }
  e.data_len = static_cast<std::uint32_t>(hunk.size());

  // Data first; the index record is the commit point.
  write_all_synced(data_path(), hunk, true);
  write_all_synced(index_path(), encode_revlog_record(e), true);
  entries_.push_back(e);
  return {e.seq, true};
}

std::string Revlog::read(std::uint32_t seq) const {
  const RevlogEntry& target = entry(seq);
  const RevlogEntry& base = entries_[target.base_seq];
  auto corrupt = [&](const std::string& why) {
    return Error(Errc::CorruptHunk, name_ + " revision " + std::to_string(seq) + ": " + why);
  };

  std::uint64_t start = base.data_offset;
  std::uint64_t length = target.data_offset + target.data_len - start;
  std::string span(length, '\0');
  if (length > 0) {
    std::ifstream in(data_path(), std::ios::binary);
    if (!in) throw corrupt("data file missing");
    in.seekg(static_cast<std::streamoff>(start));
    in.read(span.data(), static_cast<std::streamsize>(length));
    if (static_cast<std::uint64_t>(in.gcount()) != length) throw corrupt("data file truncated");
  }

  auto hunk_of = [&](const RevlogEntry& e) {
    auto decoded = decode_hunk(std::string_view(span).substr(e.data_offset - start, e.data_len));
    if (!decoded) throw corrupt("undecodable hunk " + std::to_string(e.seq));
    return std::move(*decoded);
  };

  std::string text = hunk_of(base);
  if (target.base_seq != seq) {
    std::vector<BinDelta> chain;
    try {
      for (std::uint32_t s = target.base_seq + 1; s <= seq; ++s) chain.push_back(decode_delta(hunk_of(entries_[s])));
      text = delta_apply(text, delta_combine_chain(chain));
    } catch (const Error& err) {
      if (err.code() == Errc::CorruptHunk) throw;
      throw corrupt(err.what());
    }
  }
  if (text.size() != target.full_len || hash_object(ObjectKind::Blob, text) != target.linked_id)
    throw corrupt("content does not match its id");
  return text;
}

}  // namespace vcs
