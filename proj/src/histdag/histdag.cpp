#include "vcs/histdag.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include "vcs/error.hpp"

namespace vcs {

std::string_view ff_status_name(FfStatus status) {
  switch (status) {
    case FfStatus::AlreadyUpToDate:
      return "already-up-to-date";
    case FfStatus::FastForward:
      return "fast-forward";
    case FfStatus::NeedsMerge:
      return "needs-merge";
  }
  return "?";
}

void HistoryDag::add_commit(const ObjectId& id, std::vector<ObjectId> parents, std::int64_t timestamp) {
  if (auto it = nodes_.find(id); it != nodes_.end()) {
    if (it->second.parents != parents)
      throw Error(Errc::InvalidArgument, "commit " + id.hex() + " re-added with different parents");
    return;
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (!contains(parents[i])) throw Error(Errc::UnknownCommit, parents[i].hex());
    if (parents[i] == id) throw Error(Errc::InvalidArgument, "commit is its own parent");
    for (std::size_t j = 0; j < i; ++j)
      if (parents[j] == parents[i]) throw Error(Errc::InvalidArgument, "duplicate parent " + parents[i].hex());
  }
  nodes_.emplace(id, Node{std::move(parents), timestamp});
}

const HistoryDag::Node& HistoryDag::node(const ObjectId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::UnknownCommit, id.hex());
  return it->second;
}

const std::vector<ObjectId>& HistoryDag::parents(const ObjectId& id) const { return node(id).parents; }
std::int64_t HistoryDag::timestamp(const ObjectId& id) const { return node(id).timestamp; }

std::vector<ObjectId> HistoryDag::ids() const {
  std::vector<ObjectId> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

std::unordered_set<ObjectId> HistoryDag::ancestors(const ObjectId& id) const {
  node(id);
  std::unordered_set<ObjectId> seen{id};
  std::deque<ObjectId> queue{id};
  while (!queue.empty()) {
    ObjectId cur = queue.front();
    queue.pop_front();
    for (const auto& p : nodes_.at(cur).parents)
      if (seen.insert(p).second) queue.push_back(p);
  }
  return seen;
}

bool HistoryDag::is_ancestor(const ObjectId& a, const ObjectId& b) const {
  node(a);
  node(b);
  if (a == b) return true;
  std::unordered_set<ObjectId> seen{b};
  std::deque<ObjectId> queue{b};
  while (!queue.empty()) {
    ObjectId cur = queue.front();
    queue.pop_front();
    for (const auto& p : nodes_.at(cur).parents) {
      if (p == a) return true;
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return false;
}

std::vector<ObjectId> HistoryDag::lca_candidates(const ObjectId& x, const ObjectId& y) const {
  auto ax = ancestors(x);
  auto ay = ancestors(y);
  std::vector<ObjectId> common;
  for (const auto& id : ax)
    if (ay.count(id)) common.push_back(id);
  if (common.empty()) throw Error(Errc::EmptyResult, "no common ancestor of " + x.hex() + " and " + y.hex());

  // Anything strictly below a common ancestor is not maximal.
  std::unordered_set<ObjectId> dominated;
  std::deque<ObjectId> queue;
  for (const auto& c : common)
    for (const auto& p : nodes_.at(c).parents)
      if (dominated.insert(p).second) queue.push_back(p);
  while (!queue.empty()) {
    ObjectId cur = queue.front();
    queue.pop_front();
    for (const auto& p : nodes_.at(cur).parents)
      if (dominated.insert(p).second) queue.push_back(p);
  }
  std::vector<ObjectId> out;
  for (const auto& c : common)
    if (!dominated.count(c)) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

FfStatus HistoryDag::ff_status(const ObjectId& ours, const ObjectId& theirs) const {
  if (is_ancestor(theirs, ours)) return FfStatus::AlreadyUpToDate;
  if (is_ancestor(ours, theirs)) return FfStatus::FastForward;
  return FfStatus::NeedsMerge;
}

std::vector<ObjectId> HistoryDag::toposort(std::span<const ObjectId> heads) const {
  std::unordered_set<ObjectId> reach;
  for (const auto& h : heads) {
    auto a = ancestors(h);
    reach.insert(a.begin(), a.end());
  }
  std::unordered_map<ObjectId, std::size_t> pending_children;
  for (const auto& id : reach) pending_children.emplace(id, 0);
  for (const auto& id : reach)
    for (const auto& p : nodes_.at(id).parents) ++pending_children[p];

  auto later_first = [this](const ObjectId& a, const ObjectId& b) {
    std::int64_t ta = nodes_.at(a).timestamp;
    std::int64_t tb = nodes_.at(b).timestamp;
    if (ta != tb) return ta < tb;  // priority_queue pops the "largest"
    return a > b;
  };
  std::priority_queue<ObjectId, std::vector<ObjectId>, decltype(later_first)> ready(later_first);
  for (const auto& [id, n] : pending_children)
    if (n == 0) ready.push(id);
  std::vector<ObjectId> out;
  out.reserve(reach.size());
  while (!ready.empty()) {
    ObjectId cur = ready.top();
    ready.pop();
    out.push_back(cur);
    for (const auto& p : nodes_.at(cur).parents)
      if (--pending_children[p] == 0) ready.push(p);
  }
  return out;
}

}  // namespace vcs
