#pragma once

// Commit ancestry graph and branch pointers.
//
// is_ancestor(x, x) is true: a commit counts among its own ancestors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vcs/object.hpp"

namespace vcs {

enum class FfStatus { AlreadyUpToDate, FastForward, NeedsMerge };

std::string_view ff_status_name(FfStatus status);

class HistoryDag {
 public:
  // Parents must already be present (Errc::UnknownCommit). Re-adding an id
  // with identical parents is a no-op; different parents are rejected.
  void add_commit(const ObjectId& id, std::vector<ObjectId> parents, std::int64_t timestamp = 0);

  bool contains(const ObjectId& id) const { return nodes_.count(id) != 0; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<ObjectId>& parents(const ObjectId& id) const;
  std::int64_t timestamp(const ObjectId& id) const;
  std::vector<ObjectId> ids() const;

  // Every commit reachable from `id`, `id` included.
  std::unordered_set<ObjectId> ancestors(const ObjectId& id) const;
  bool is_ancestor(const ObjectId& a, const ObjectId& b) const;

  // Maximal common ancestors, sorted by id. Throws EmptyResult when `x` and
  // `y` share no ancestor.
  std::vector<ObjectId> lca_candidates(const ObjectId& x, const ObjectId& y) const;

  FfStatus ff_status(const ObjectId& ours, const ObjectId& theirs) const;

  // Commits reachable from `heads`, children before parents; among ready
  // commits, newer timestamp first, then smaller id.
  std::vector<ObjectId> toposort(std::span<const ObjectId> heads) const;

 private:
  struct Node {
    std::vector<ObjectId> parents;
    std::int64_t timestamp = 0;
  };
  std::unordered_map<ObjectId, Node> nodes_;

  const Node& node(const ObjectId& id) const;
};

// Branch pointers stored as <root>/<name> files holding "<hex>\n". Names may
// contain '/' (e.g. "remote/main") but no empty, "." or ".." components.
class RefStore {
 public:
  explicit RefStore(std::filesystem::path root);

  std::optional<ObjectId> get(std::string_view name) const;
  // Throws UnknownRef.
  ObjectId resolve(std::string_view name) const;
  void set(std::string_view name, const ObjectId& id);
  void remove(std::string_view name);
  bool exists(std::string_view name) const;
  // All refs, sorted by name.
  std::map<std::string, ObjectId> list() const;

  static bool valid_name(std::string_view name);

 private:
  std::filesystem::path root_;
  std::filesystem::path path_for(std::string_view name) const;
};

}  // namespace vcs
