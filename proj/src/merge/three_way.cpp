#include <algorithm>

#include "builder.hpp"
#include "vcs/textdiff.hpp"

namespace vcs {

std::optional<MergeStrategy> parse_merge_strategy(std::string_view name) {
  if (name == "three-way") return MergeStrategy::ThreeWay;
  if (name == "recursive") return MergeStrategy::Recursive;
  if (name == "pcdv") return MergeStrategy::Pcdv;
  return std::nullopt;
}

std::string_view merge_strategy_name(MergeStrategy strategy) {
  switch (strategy) {
    case MergeStrategy::ThreeWay:
      return "three-way";
    case MergeStrategy::Recursive:
      return "recursive";
    case MergeStrategy::Pcdv:
      return "pcdv";
  }
  return "?";
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// match[i] = index in `other` of base line i, or kNone.
std::vector<std::size_t> base_map(const Lines& base, const Lines& other) {
  std::vector<std::size_t> match(base.size(), kNone);
  for (const auto& m : script_matches(myers_diff(base, other))) match[m.a] = m.b;
  return match;
}

Lines slice(const Lines& v, std::size_t from, std::size_t to) {
  return Lines(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to));
}

}  // namespace

MergeResult three_way_merge(const Lines& base, const Lines& x, const Lines& y, const MergeLabels& labels) {
  auto mx = base_map(base, x);
  auto my = base_map(base, y);
  detail::MergeBuilder out(labels);

  std::size_t ib = 0, ix = 0, iy = 0;
  while (true) {
    // next base line kept by both sides
    std::size_t j = ib;
    while (j < base.size() && (mx[j] == kNone || my[j] == kNone)) ++j;
    if (j == ib && j < base.size() && mx[j] == ix && my[j] == iy) {
      out.take(base[j]);
      ++ib, ++ix, ++iy;
      continue;
    }
    std::size_t ex = j < base.size() ? mx[j] : x.size();
    std::size_t ey = j < base.size() ? my[j] : y.size();
    Lines b = slice(base, ib, j);
    Lines cx = slice(x, ix, ex);
    Lines cy = slice(y, iy, ey);
    if (cx == b) {
      out.take(cy);
    } else if (cy == b || cx == cy) {
      out.take(cx);
    } else {
      out.conflict(cx, cy);
    }
    if (j >= base.size()) break;
    ib = j, ix = ex, iy = ey;
  }
  return out.finish();
}

}  // namespace vcs
