#include <algorithm>
#include <unordered_map>

#include "vcs/merge.hpp"

namespace vcs {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::unordered_map<std::uint64_t, std::size_t> line_hashes(std::string_view text, std::size_t& total) {
  std::unordered_map<std::uint64_t, std::size_t> counts;
  total = 0;
  for (const auto& line : split_lines(text)) {
    ++counts[fnv1a(line)];
    ++total;
  }
  return counts;
}

}  // namespace

double similarity_index(std::string_view a, std::string_view b) {
  std::size_t na = 0, nb = 0;
  auto ha = line_hashes(a, na);
  auto hb = line_hashes(b, nb);
  if (na == 0 && nb == 0) return 1.0;
  std::size_t shared = 0;
  for (const auto& [h, n] : ha)
    if (auto it = hb.find(h); it != hb.end()) shared += std::min(n, it->second);
  return static_cast<double>(shared) / static_cast<double>(std::max(na, nb));
}

std::vector<RenameMatch> detect_renames(const std::map<std::string, std::string>& before,
                                        const std::map<std::string, std::string>& after, double threshold) {
  std::vector<const std::string*> deleted, added;
  for (const auto& [path, content] : before)
    if (!after.count(path)) deleted.push_back(&path);
  for (const auto& [path, content] : after)
    if (!before.count(path)) added.push_back(&path);

  std::vector<RenameMatch> candidates;
  for (const auto* d : deleted)
    for (const auto* a : added) {
      double score = similarity_index(before.at(*d), after.at(*a));
      if (score >= threshold) candidates.push_back({*d, *a, score});
    }
  std::sort(candidates.begin(), candidates.end(), [](const RenameMatch& l, const RenameMatch& r) {
    if (l.score != r.score) return l.score > r.score;
    if (l.old_path != r.old_path) return l.old_path < r.old_path;
    return l.new_path < r.new_path;
  });

  std::set<std::string> used_old, used_new;
  std::vector<RenameMatch> out;
  for (auto& c : candidates) {
    if (used_old.count(c.old_path) || used_new.count(c.new_path)) continue;
    used_old.insert(c.old_path);
    used_new.insert(c.new_path);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace vcs
