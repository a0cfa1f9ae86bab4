#include <set>
#include <tuple>

#include "vcs/error.hpp"
#include "vcs/patchio.hpp"

namespace vcs {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++count;
  return count;
}

std::vector<PickaxeHit> pickaxe(const std::vector<PickaxeCommit>& commits, const FilesOf& files_of,
                                std::string_view needle) {
  if (needle.empty()) throw Error(Errc::InvalidArgument, "empty pickaxe needle");
  std::vector<PickaxeHit> hits;
  const std::map<std::string, std::string> empty_tree;
  for (const auto& commit : commits) {
    auto files = files_of(commit.id);
    std::vector<std::map<std::string, std::string>> parent_files;
    for (const auto& p : commit.parents) parent_files.push_back(files_of(p));
    if (parent_files.empty()) parent_files.push_back(empty_tree);

    std::set<std::tuple<std::string, PickaxeChange>> seen;
    std::map<std::string, std::vector<PickaxeHit>> by_path;
    for (const auto& parent : parent_files) {
      std::set<std::string> paths;
      for (const auto& [p, c] : files) paths.insert(p);
      for (const auto& [p, c] : parent) paths.insert(p);
      for (const auto& path : paths) {
        auto count_in = [&](const std::map<std::string, std::string>& tree) {
          auto it = tree.find(path);
          return it == tree.end() ? std::size_t{0} : count_occurrences(it->second, needle);
        };
        std::size_t before = count_in(parent), after = count_in(files);
        if (before == after) continue;
        auto change = after > before ? PickaxeChange::Added : PickaxeChange::Removed;
        if (!seen.emplace(path, change).second) continue;
        by_path[path].push_back({commit.id, path, change, before, after});
      }
    }
    for (auto& [path, list] : by_path)
      for (auto& h : list) hits.push_back(std::move(h));
  }
  return hits;
}

}  // namespace vcs
