#include "vcs/bindelta.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"

namespace vcs {

namespace {

constexpr std::uint64_t kHashBase = 1000003;

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

std::uint64_t block_hash(std::string_view data, std::size_t pos, std::size_t window) {
  std::uint64_t h = 0;
  for (std::size_t k = 0; k < window; ++k) h = h * kHashBase + static_cast<std::uint8_t>(data[pos + k]);
  return h;
}

// Appends while coalescing with the previous op and dropping empty ones.
class OpSink {
 public:
  explicit OpSink(std::vector<DeltaOp>& ops) : ops_(ops) {}

  void copy(std::uint64_t offset, std::uint64_t len) {
    if (len == 0) return;
    if (!ops_.empty()) {
      if (auto* prev = std::get_if<CopyOp>(&ops_.back()); prev && prev->offset + prev->len == offset) {
        prev->len += len;
        return;
      }
    }
    ops_.push_back(CopyOp{offset, len});
  }

  void insert(std::string_view data) {
    if (data.empty()) return;
    if (!ops_.empty()) {
      if (auto* prev = std::get_if<InsertOp>(&ops_.back())) {
        prev->data.append(data);
        return;
      }
    }
    ops_.push_back(InsertOp{std::string(data)});
  }

 private:
  std::vector<DeltaOp>& ops_;
};

std::uint64_t op_length(const DeltaOp& op) {
  if (const auto* c = std::get_if<CopyOp>(&op)) return c->len;
  return std::get<InsertOp>(op).data.size();
}

}  // namespace

BinDelta identity_delta(std::uint64_t len) {
  BinDelta d{len, len, {}};
  if (len > 0) d.ops.push_back(CopyOp{0, len});
  return d;
}

BinDelta xdelta_make(std::string_view base, std::string_view target, std::size_t window) {
  if (window < 4 || (window & (window - 1)) != 0)
    throw Error(Errc::InvalidArgument, "delta window must be a power of two >= 4");

  BinDelta delta{base.size(), target.size(), {}};
  OpSink sink(delta.ops);

  std::unordered_map<std::uint64_t, std::vector<std::size_t>> table;
  for (std::size_t off = 0; off + window <= base.size(); off += window) {
    auto& bucket = table[block_hash(base, off, window)];
    if (bucket.size() < kMaxBucketCandidates) bucket.push_back(off);
  }

  const std::uint64_t top = power(kHashBase, window - 1);
  std::size_t pending = 0;  // start of bytes not yet emitted
  std::size_t i = 0;
  std::optional<std::uint64_t> h;

  while (!table.empty() && i + window <= target.size()) {
    if (!h) h = block_hash(target, i, window);

    std::size_t best_len = 0;
    std::size_t best_base = 0;
    std::size_t best_back = 0;
    if (auto it = table.find(*h); it != table.end()) {
      for (std::size_t off : it->second) {
        if (base.compare(off, window, target.substr(i, window)) != 0) continue;
        std::size_t fwd = window;
        while (off + fwd < base.size() && i + fwd < target.size() && base[off + fwd] == target[i + fwd])
          ++fwd;
        std::size_t back = 0;
        while (back < off && back < i - pending && base[off - back - 1] == target[i - back - 1]) ++back;
        std::size_t total = back + fwd;
        std::size_t start = off - back;
        if (total > best_len || (total == best_len && start < best_base)) {
          best_len = total;
          best_base = start;
          best_back = back;
        }
      }
    }

    if (best_len > 0) {
      std::size_t match_start = i - best_back;
      sink.insert(target.substr(pending, match_start - pending));
      sink.copy(best_base, best_len);
      pending = match_start + best_len;
      i = pending;
      h.reset();
      continue;
    }

    if (i + window < target.size()) {
      *h = (*h - top * static_cast<std::uint8_t>(target[i])) * kHashBase +
           static_cast<std::uint8_t>(target[i + window]);
    }
    ++i;
  }
  sink.insert(target.substr(pending));
  return delta;
}

std::string delta_apply(std::string_view base, const BinDelta& delta) {
  if (base.size() != delta.base_len)
    throw Error(Errc::BaseLengthMismatch, "base is " + std::to_string(base.size()) + " bytes, delta expects " +
                                              std::to_string(delta.base_len));
  std::string out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(delta.target_len, 1u << 30)));
  for (const auto& op : delta.ops) {
    if (const auto* c = std::get_if<CopyOp>(&op)) {
      if (c->offset > base.size() || c->len > base.size() - c->offset)
        throw Error(Errc::CopyOutOfRange, "copy " + std::to_string(c->offset) + "+" + std::to_string(c->len) +
                                              " exceeds base of " + std::to_string(base.size()));
      out.append(base.substr(c->offset, c->len));
    } else {
      out.append(std::get<InsertOp>(op).data);
    }
  }
  if (out.size() != delta.target_len)
    throw Error(Errc::TargetLengthMismatch, "produced " + std::to_string(out.size()) + " bytes, expected " +
                                                std::to_string(delta.target_len));
  return out;
}

BinDelta delta_combine(const BinDelta& d1, const BinDelta& d2) {
  if (d1.target_len != d2.base_len)
    throw Error(Errc::ChainMismatch, "first delta yields " + std::to_string(d1.target_len) +
                                         " bytes, second expects " + std::to_string(d2.base_len));

  // Start of each d1 op in B coordinates.
  std::vector<std::uint64_t> starts;
  starts.reserve(d1.ops.size());
  std::uint64_t produced = 0;
  for (const auto& op : d1.ops) {
    starts.push_back(produced);
    produced += op_length(op);
  }
  if (produced != d1.target_len) throw Error(Errc::ChainMismatch, "first delta is internally inconsistent");

  BinDelta out{d1.base_len, d2.target_len, {}};
  OpSink sink(out.ops);
  for (const auto& op : d2.ops) {
    if (const auto* ins = std::get_if<InsertOp>(&op)) {
      sink.insert(ins->data);
      continue;
    }
    const auto& c = std::get<CopyOp>(op);
    if (c.offset > d1.target_len || c.len > d1.target_len - c.offset)
      throw Error(Errc::CopyOutOfRange, "copy beyond intermediate text");
    std::uint64_t pos = c.offset;
    std::uint64_t remaining = c.len;
    auto seg = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), pos) - starts.begin()) - 1;
    while (remaining > 0) {
      while (pos >= starts[seg] + op_length(d1.ops[seg])) ++seg;
      std::uint64_t within = pos - starts[seg];
      std::uint64_t take = std::min(remaining, op_length(d1.ops[seg]) - within);
      if (const auto* src = std::get_if<CopyOp>(&d1.ops[seg])) {
        sink.copy(src->offset + within, take);
      } else {
        sink.insert(std::string_view(std::get<InsertOp>(d1.ops[seg]).data).substr(within, take));
      }
      pos += take;
      remaining -= take;
    }
  }
  return out;
}

BinDelta delta_combine_chain(std::span<const BinDelta> chain) {
  if (chain.empty()) throw Error(Errc::InvalidArgument, "empty delta chain");
  BinDelta acc = chain.front();
  for (std::size_t k = 1; k < chain.size(); ++k) acc = delta_combine(acc, chain[k]);
  return acc;
}

std::uint64_t delta_insert_bytes(const BinDelta& delta) {
  std::uint64_t n = 0;
  for (const auto& op : delta.ops)
    if (const auto* ins = std::get_if<InsertOp>(&op)) n += ins->data.size();
  return n;
}

std::string encode_delta(const BinDelta& delta) {
  std::string out;
  put_varint(out, delta.base_len);
  put_varint(out, delta.target_len);
  for (const auto& op : delta.ops) {
    if (const auto* c = std::get_if<CopyOp>(&op)) {
      out.push_back('\x01');
      put_varint(out, c->offset);
      put_varint(out, c->len);
    } else {
      const auto& data = std::get<InsertOp>(op).data;
      out.push_back('\x00');
      put_varint(out, data.size());
      out.append(data);
    }
  }
  return out;
}

BinDelta decode_delta(std::string_view bytes) {
  auto fail = [](const std::string& why) { return Error(Errc::MalformedDelta, why); };
  std::size_t pos = 0;
  auto base_len = get_varint(bytes, pos);
  auto target_len = get_varint(bytes, pos);
  if (!base_len || !target_len) throw fail("truncated header");
  BinDelta delta{*base_len, *target_len, {}};
  std::uint64_t produced = 0;
  while (pos < bytes.size()) {
    auto tag = static_cast<std::uint8_t>(bytes[pos++]);
    if (tag == 0x01) {
      auto offset = get_varint(bytes, pos);
      auto len = get_varint(bytes, pos);
      if (!offset || !len) throw fail("truncated copy");
      if (*offset > delta.base_len || *len > delta.base_len - *offset) throw fail("copy outside base");
      delta.ops.push_back(CopyOp{*offset, *len});
      produced += *len;
    } else if (tag == 0x00) {
      auto len = get_varint(bytes, pos);
      if (!len || *len > bytes.size() - pos) throw fail("truncated insert");
      delta.ops.push_back(InsertOp{std::string(bytes.substr(pos, *len))});
      pos += *len;
      produced += *len;
    } else {
      throw fail("unknown op tag " + std::to_string(tag));
    }
    if (produced > delta.target_len) throw fail("ops exceed target length");
  }
  if (produced != delta.target_len) throw fail("ops do not fill target length");
  return delta;
}

}  // namespace vcs
