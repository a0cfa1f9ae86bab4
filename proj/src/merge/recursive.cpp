#include <algorithm>
#include <unordered_set>

#include "vcs/error.hpp"
#include "vcs/merge.hpp"

namespace vcs {

namespace {

// A merge input: either a real commit or a virtual merge of several, in
// which case its history is the union of theirs.
struct Node {
  std::vector<ObjectId> heads;
  Lines content;
};

std::unordered_set<ObjectId> ancestors_of(const HistoryDag& dag, const std::vector<ObjectId>& heads) {
  std::unordered_set<ObjectId> out;
  for (const auto& h : heads) {
    auto a = dag.ancestors(h);
    out.insert(a.begin(), a.end());
  }
  return out;
}

std::vector<ObjectId> common_maximal(const HistoryDag& dag, const Node& a, const Node& b) {
  if (a.heads.size() == 1 && b.heads.size() == 1) {
    try {
      return dag.lca_candidates(a.heads[0], b.heads[0]);
    } catch (const Error& e) {
      if (e.code() == Errc::EmptyResult) return {};
      throw;
    }
  }
  auto aa = ancestors_of(dag, a.heads);
  auto bb = ancestors_of(dag, b.heads);
  std::vector<ObjectId> common;
  for (const auto& id : aa)
    if (bb.count(id)) common.push_back(id);
  std::vector<ObjectId> out;
  for (const auto& c : common) {
    bool dominated = std::any_of(common.begin(), common.end(),
                                 [&](const ObjectId& d) { return d != c && dag.is_ancestor(c, d); });
    if (!dominated) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

class Recursive {
 public:
  Recursive(const HistoryDag& dag, const ContentOf& content_of) : dag_(dag), content_of_(content_of) {}

  MergeResult merge(const Node& x, const Node& y, const MergeLabels& labels) {
    auto candidates = common_maximal(dag_, x, y);
    Lines base;
    if (!candidates.empty()) base = virtual_base(candidates).content;
    return three_way_merge(base, x.content, y.content, labels);
  }

  Node virtual_base(const std::vector<ObjectId>& candidates) {
    Node acc{{candidates[0]}, content_of_(candidates[0])};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      Node next{{candidates[i]}, content_of_(candidates[i])};
      MergeLabels labels{"virtual " + acc.heads.back().short_hex(), "virtual " + candidates[i].short_hex()};
      Lines merged = merge(acc, next, labels).lines;
      acc.heads.push_back(candidates[i]);
      acc.content = std::move(merged);
    }
    return acc;
  }

 private:
  const HistoryDag& dag_;
  const ContentOf& content_of_;
};

}  // namespace

MergeResult recursive_merge(const HistoryDag& dag, const ContentOf& content_of, const ObjectId& x,
                            const ObjectId& y, const MergeLabels& labels) {
  std::vector<ObjectId> candidates;
  try {
    candidates = dag.lca_candidates(x, y);
  } catch (const Error& e) {
    if (e.code() == Errc::EmptyResult)
      throw Error(Errc::UnrelatedHistories, x.short_hex() + " and " + y.short_hex() + " share no history");
    throw;
  }
  Recursive r(dag, content_of);
  Lines base = r.virtual_base(candidates).content;
  return three_way_merge(base, content_of(x), content_of(y), labels);
}

}  // namespace vcs
