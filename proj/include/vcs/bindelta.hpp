#pragma once

// Copy/Insert binary deltas built by rolling-hash block matching.
//
// Wire form: varint base_len, varint target_len, then ops until the end of
// input. Op tag 0x01 is Copy(varint offset, varint len); tag 0x00 is
// Insert(varint len, raw bytes). Varints are unsigned LEB128.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vcs {

struct CopyOp {
  std::uint64_t offset = 0;
  std::uint64_t len = 0;
  bool operator==(const CopyOp&) const = default;
};

struct InsertOp {
  std::string data;
  bool operator==(const InsertOp&) const = default;
};

using DeltaOp = std::variant<CopyOp, InsertOp>;

struct BinDelta {
  std::uint64_t base_len = 0;
  std::uint64_t target_len = 0;
  std::vector<DeltaOp> ops;
  bool operator==(const BinDelta&) const = default;
};

inline constexpr std::size_t kDefaultDeltaWindow = 16;
// Base blocks remembered per hash bucket; bounds work on periodic input.
inline constexpr std::size_t kMaxBucketCandidates = 64;

// `window` must be a power of two >= 4 (Errc::InvalidArgument otherwise).
BinDelta xdelta_make(std::string_view base, std::string_view target,
                     std::size_t window = kDefaultDeltaWindow);

// Throws BaseLengthMismatch, CopyOutOfRange or TargetLengthMismatch.
std::string delta_apply(std::string_view base, const BinDelta& delta);

// d1: A -> B, d2: B -> C; result: A -> C. Throws ChainMismatch when
// d1.target_len != d2.base_len.
BinDelta delta_combine(const BinDelta& d1, const BinDelta& d2);
// Left fold of delta_combine over a non-empty chain.
BinDelta delta_combine_chain(std::span<const BinDelta> chain);

// Identity delta of a `len`-byte input.
BinDelta identity_delta(std::uint64_t len);

std::uint64_t delta_insert_bytes(const BinDelta& delta);

std::string encode_delta(const BinDelta& delta);
// Throws MalformedDelta on truncation, unknown tags, trailing bytes,
// out-of-range copies or a length total that disagrees with target_len.
BinDelta decode_delta(std::string_view bytes);

}  // namespace vcs
