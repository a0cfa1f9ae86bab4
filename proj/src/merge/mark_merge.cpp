#include <algorithm>

#include "vcs/error.hpp"
#include "vcs/merge.hpp"

namespace vcs {

std::vector<ObjectId> maximal_marks(const HistoryDag& dag, const std::set<ObjectId>& marks, const ObjectId& rev) {
  std::vector<ObjectId> marked;
  for (const auto& a : dag.ancestors(rev))
    if (marks.count(a)) marked.push_back(a);
  std::vector<ObjectId> out;
  for (const auto& m : marked) {
    bool covered = std::any_of(marked.begin(), marked.end(),
                               [&](const ObjectId& d) { return d != m && dag.is_ancestor(m, d); });
    if (!covered) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScalarMergeResult mark_merge(const HistoryDag& dag, const std::set<ObjectId>& marks, const ObjectId& x,
                             const ObjectId& y, const std::string& v_x, const std::string& v_y) {
  if (!dag.contains(x)) throw Error(Errc::UnknownCommit, x.hex());
  if (!dag.contains(y)) throw Error(Errc::UnknownCommit, y.hex());
  if (v_x == v_y) return {v_x, std::nullopt};

  auto star_x = maximal_marks(dag, marks, x);
  auto star_y = maximal_marks(dag, marks, y);
  if (star_x.empty() || star_y.empty())
    throw Error(Errc::NoMarks, "no marked ancestor of " + (star_x.empty() ? x : y).short_hex());

  auto all_below = [&](const std::vector<ObjectId>& star, const ObjectId& r) {
    return std::all_of(star.begin(), star.end(), [&](const ObjectId& m) { return dag.is_ancestor(m, r); });
  };
  if (all_below(star_x, y)) return {v_y, std::nullopt};
  if (all_below(star_y, x)) return {v_x, std::nullopt};
  return {std::nullopt, std::pair{v_x, v_y}};
}

}  // namespace vcs
