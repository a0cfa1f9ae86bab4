#include "vcs/pack.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "vcs/bindelta.hpp"
#include "vcs/bytes.hpp"
#include "vcs/error.hpp"

namespace vcs {

namespace {

constexpr std::string_view kPackMagic = "VPAK";
constexpr std::string_view kIndexMagic = "VIDX";
constexpr std::uint8_t kFormatVersion = 1;
constexpr std::uint8_t kTypeDelta = 4;
constexpr std::size_t kFanoutSize = 256 * 4;
constexpr std::size_t kRecordSize = ObjectId::kSize + 8;

std::string file_header(std::string_view magic) {
  std::string h(magic);
  h.push_back(static_cast<char>(kFormatVersion));
  h.append(3, '\0');
  return h;
}

std::string digest_bytes(std::string_view data) {
  Digest d = sha1(data);
  return std::string(reinterpret_cast<const char*>(d.data()), d.size());
}

std::vector<ObjectId> references(const PackObject& obj) {
  std::vector<ObjectId> refs;
  if (obj.kind == ObjectKind::Tree) {
    for (const auto& e : parse_tree(obj.payload).entries) refs.push_back(e.id);
  } else if (obj.kind == ObjectKind::Commit) {
    Commit c = parse_commit(obj.payload);
    refs.push_back(c.tree);
    refs.insert(refs.end(), c.parents.begin(), c.parents.end());
  }
  return refs;
}

Error corrupt(const std::string& why) { return Error(Errc::CorruptPack, why); }

}  // namespace

std::vector<std::size_t> delta_candidate_order(std::span<const PackObject> objects) {
  auto group = [](ObjectKind k) {
    switch (k) {
      case ObjectKind::Commit:
        return 0;
      case ObjectKind::Tree:
        return 1;
      case ObjectKind::Blob:
        return 2;
    }
    return 3;
  };
  std::vector<std::string> reversed(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i)
    reversed[i] = std::string(objects[i].path.rbegin(), objects[i].path.rend());

  std::vector<std::size_t> order(objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = objects[x];
    const auto& b = objects[y];
    if (group(a.kind) != group(b.kind)) return group(a.kind) < group(b.kind);
    if (a.kind == ObjectKind::Blob && reversed[x] != reversed[y]) return reversed[x] < reversed[y];
    if (a.payload.size() != b.payload.size()) return a.payload.size() > b.payload.size();
    return a.id < b.id;
  });
  return order;
}

std::vector<PackObject> collect_reachable(std::span<const ObjectId> heads, const ObjectFetcher& fetch) {
  std::vector<PackObject> out;
  std::unordered_set<ObjectId> seen;
  std::deque<std::pair<ObjectId, std::string>> queue;
  for (const auto& h : heads)
    if (seen.insert(h).second) queue.emplace_back(h, "");
  while (!queue.empty()) {
    auto [id, path] = queue.front();
    queue.pop_front();
    auto stored = fetch(id);
    if (!stored) throw Error(Errc::DanglingReference, id.hex() + (path.empty() ? "" : " (" + path + ")"));
    PackObject obj{id, stored->kind, std::move(stored->payload), path};
    if (obj.kind == ObjectKind::Commit) {
      Commit c = parse_commit(obj.payload);
      if (seen.insert(c.tree).second) queue.emplace_back(c.tree, "");
      for (const auto& p : c.parents)
        if (seen.insert(p).second) queue.emplace_back(p, "");
    } else if (obj.kind == ObjectKind::Tree) {
      for (const auto& e : parse_tree(obj.payload).entries)
        if (seen.insert(e.id).second) queue.emplace_back(e.id, path.empty() ? e.name : path + "/" + e.name);
    }
    out.push_back(std::move(obj));
  }
  return out;
}

PackBuildResult build_pack(std::span<const PackObject> objects, std::size_t window, std::size_t max_depth) {
  std::unordered_map<ObjectId, std::size_t> position;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (hash_object(objects[i].kind, objects[i].payload) != objects[i].id)
      throw Error(Errc::InvalidArgument, "object " + objects[i].id.hex() + " does not hash to its id");
    if (!position.emplace(objects[i].id, i).second)
      throw Error(Errc::InvalidArgument, "duplicate object " + objects[i].id.hex() + " in pack input");
  }
  for (const auto& obj : objects)
    for (const auto& ref : references(obj))
      if (!position.count(ref)) throw Error(Errc::DanglingReference, obj.id.hex() + " -> " + ref.hex());

  // Delta selection over the candidate order.
  struct Choice {
    std::optional<std::size_t> base;
    std::string stored;  // zlib stream written to the pack
    std::uint64_t raw_size = 0;
    std::size_t depth = 0;
  };
  std::vector<Choice> choice(objects.size());
  auto order = delta_candidate_order(objects);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const PackObject& obj = objects[order[k]];
    Choice& c = choice[order[k]];
    c.stored = zlib_compress(obj.payload);
    c.raw_size = obj.payload.size();
    for (std::size_t back = 1; back <= window && back <= k; ++back) {
      std::size_t cand = order[k - back];
      if (objects[cand].kind != obj.kind) break;  // kinds are grouped
      if (choice[cand].depth + 1 > max_depth) continue;
      std::string delta = encode_delta(xdelta_make(objects[cand].payload, obj.payload));
      std::string packed = zlib_compress(delta);
      if (packed.size() < c.stored.size()) {
        c.base = cand;
        c.stored = std::move(packed);
        c.raw_size = delta.size();
        c.depth = choice[cand].depth + 1;
      }
    }
  }

  PackBuildResult result;
  result.pack = file_header(kPackMagic);
  put_u32be(result.pack, static_cast<std::uint32_t>(objects.size()));
  std::vector<std::optional<std::uint64_t>> offset(objects.size());

  std::function<void(std::size_t)> emit = [&](std::size_t i) {
    if (offset[i]) return;
    const Choice& c = choice[i];
    if (c.base) emit(*c.base);
    offset[i] = result.pack.size();
    std::string& out = result.pack;
    out.push_back(static_cast<char>(c.base ? kTypeDelta : static_cast<std::uint8_t>(objects[i].kind)));
    put_varint(out, c.raw_size);
    if (c.base) out.append(objects[*c.base].id.raw());
    put_varint(out, c.stored.size());
    out.append(c.stored);
    if (c.base) ++result.delta_count;
    result.max_depth = std::max(result.max_depth, c.depth);
  };
  for (std::size_t i = 0; i < objects.size(); ++i) emit(i);
  std::string pack_sum = digest_bytes(result.pack);
  result.pack.append(pack_sum);
  result.checksum_hex = to_hex(pack_sum);

  std::vector<std::size_t> by_id(objects.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return objects[a].id < objects[b].id; });

  std::string& idx = result.index;
  idx = file_header(kIndexMagic);
  std::uint32_t counts[256] = {};
  for (std::size_t i : by_id) ++counts[static_cast<std::uint8_t>(objects[i].id.raw()[0])];
  std::uint32_t cumulative = 0;
  for (std::uint32_t n : counts) {
    cumulative += n;
    put_u32be(idx, cumulative);
  }
  for (std::size_t i : by_id) {
    idx.append(objects[i].id.raw());
    put_u64be(idx, *offset[i]);
  }
  idx.append(pack_sum);
  idx.append(digest_bytes(idx));
  return result;
}

PackReader PackReader::open(const std::filesystem::path& pack_path, const std::filesystem::path& index_path) {
  return from_bytes(read_file(pack_path), read_file(index_path));
}

PackReader PackReader::from_bytes(std::string pack, std::string index, bool verify_checksums) {
  PackReader r;
  r.pack_ = std::move(pack);
  r.index_ = std::move(index);
  const std::string& p = r.pack_;
  const std::string& x = r.index_;
  if (p.size() < 12 + ObjectId::kSize || p.compare(0, 8, file_header(kPackMagic)) != 0)
    throw corrupt("bad pack header");
  std::size_t header = 8;
  if (x.size() < header + kFanoutSize + 2 * ObjectId::kSize || x.compare(0, 8, file_header(kIndexMagic)) != 0)
    throw corrupt("bad index header");
  r.count_ = get_u32be(x, header + kFanoutSize - 4);
  if (x.size() != header + kFanoutSize + r.count_ * kRecordSize + 2 * ObjectId::kSize)
    throw corrupt("index size does not match its fanout");
  if (get_u32be(p, 8) != r.count_) throw corrupt("pack and index disagree on object count");
  std::uint32_t prev = 0;
  for (std::size_t b = 0; b < 256; ++b) {
    std::uint32_t v = get_u32be(x, header + 4 * b);
    if (v < prev) throw corrupt("fanout is not cumulative");
    prev = v;
  }
  std::string_view pack_sum = std::string_view(p).substr(p.size() - ObjectId::kSize);
  std::string_view idx_pack_sum = std::string_view(x).substr(x.size() - 2 * ObjectId::kSize, ObjectId::kSize);
  if (pack_sum != idx_pack_sum) throw corrupt("index belongs to a different pack");
  if (verify_checksums) {
    if (digest_bytes(std::string_view(p).substr(0, p.size() - ObjectId::kSize)) != pack_sum)
      throw corrupt("pack checksum mismatch");
    if (digest_bytes(std::string_view(x).substr(0, x.size() - ObjectId::kSize)) !=
        std::string_view(x).substr(x.size() - ObjectId::kSize))
      throw corrupt("index checksum mismatch");
  }
  return r;
}

ObjectId PackReader::record_id(std::size_t i) const {
  return *ObjectId::from_raw(std::string_view(index_).substr(8 + kFanoutSize + i * kRecordSize, ObjectId::kSize));
}

std::uint64_t PackReader::record_offset(std::size_t i) const {
  return get_u64be(index_, 8 + kFanoutSize + i * kRecordSize + ObjectId::kSize);
}

std::optional<std::uint64_t> PackReader::lookup(const ObjectId& id) const {
  auto first = static_cast<std::uint8_t>(id.raw()[0]);
  std::size_t lo = first == 0 ? 0 : get_u32be(index_, 8 + 4 * (first - 1));
  std::size_t hi = get_u32be(index_, 8 + 4 * first);
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    ObjectId probe = record_id(mid);
    if (probe == id) return record_offset(mid);
    if (probe < id) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

std::vector<ObjectId> PackReader::ids() const {
  std::vector<ObjectId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(record_id(i));
  return out;
}

PackReader::RawEntry PackReader::parse_entry(std::uint64_t offset) const {
  std::size_t end = pack_.size() - ObjectId::kSize;
  if (offset < 12 || offset >= end) throw corrupt("entry offset out of range");
  std::string_view body = std::string_view(pack_).substr(0, end);
  std::size_t pos = offset;
  RawEntry e;
  e.type = static_cast<std::uint8_t>(body[pos++]);
  if (e.type < 1 || e.type > kTypeDelta) throw corrupt("bad entry type");
  auto size = get_varint(body, pos);
  if (!size) throw corrupt("truncated entry size");
  e.size = *size;
  if (e.type == kTypeDelta) {
    if (pos + ObjectId::kSize > body.size()) throw corrupt("truncated base id");
    e.base = ObjectId::from_raw(body.substr(pos, ObjectId::kSize));
    pos += ObjectId::kSize;
  }
  auto clen = get_varint(body, pos);
  if (!clen || *clen > body.size() - pos) throw corrupt("truncated entry payload");
  auto payload = zlib_decompress(body.substr(pos, *clen));
  if (!payload || payload->size() != e.size) throw corrupt("undecodable entry payload");
  e.payload = std::move(*payload);
  return e;
}

StoredObject PackReader::read(const ObjectId& id) const {
  auto offset = lookup(id);
  if (!offset) throw Error(Errc::UnknownObject, id.hex());
  std::vector<BinDelta> deltas;
  RawEntry e = parse_entry(*offset);
  while (e.type == kTypeDelta) {
    if (deltas.size() > count_) throw corrupt("delta cycle");
    try {
      deltas.push_back(decode_delta(e.payload));
    } catch (const Error& err) {
      throw corrupt(err.what());
    }
    auto base_offset = lookup(*e.base);
    if (!base_offset) throw corrupt("delta base " + e.base->hex() + " missing from pack");
    e = parse_entry(*base_offset);
  }
  auto kind = static_cast<ObjectKind>(e.type);
  std::string content = std::move(e.payload);
  if (!deltas.empty()) {
    std::reverse(deltas.begin(), deltas.end());
    try {
      content = delta_apply(content, delta_combine_chain(deltas));
    } catch (const Error& err) {
      throw corrupt(err.what());
    }
  }
  if (hash_object(kind, content) != id) throw corrupt(id.hex() + " does not match its content");
  return {kind, std::move(content)};
}

std::vector<PackEntryInfo> PackReader::entries() const {
  std::vector<PackEntryInfo> out;
  for (std::size_t i = 0; i < count_; ++i) {
    PackEntryInfo info;
    info.id = record_id(i);
    info.offset = record_offset(i);
    RawEntry e = parse_entry(info.offset);
    info.type = e.type;
    info.base = e.base;
    std::optional<ObjectId> cursor = e.base;
    while (cursor) {
      if (++info.depth > count_) throw corrupt("delta cycle");
      auto off = lookup(*cursor);
      if (!off) throw corrupt("delta base missing");
      cursor = parse_entry(*off).base;
    }
    out.push_back(info);
  }
  return out;
}

std::filesystem::path write_pack(const std::filesystem::path& packs_dir, const PackBuildResult& built) {
  std::filesystem::create_directories(packs_dir);
  auto stem = packs_dir / ("pack-" + built.checksum_hex);
  auto pack_path = stem;
  pack_path += ".pack";
  auto idx_path = stem;
  idx_path += ".idx";
  // Index last: readers discover packs through their index.
  write_file_atomic(pack_path, built.pack);
  write_file_atomic(idx_path, built.index);
  return pack_path;
}

}  // namespace vcs
