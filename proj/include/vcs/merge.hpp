#pragma once

// Content and scalar merging.
//
// Conflict regions in merged output look like
//
//   <<<<<<< ours-label
//   ...ours lines...
//   =======
//   ...theirs lines...
//   >>>>>>> theirs-label
//
// A side whose last line has no trailing newline gets one inside the region,
// so the marker lines always start at column 0.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/histdag.hpp"
#include "vcs/lines.hpp"
#include "vcs/weave.hpp"

namespace vcs {

struct Conflict {
  Lines ours;
  Lines theirs;
  std::size_t position = 0;  // index of the "<<<<<<<" line in MergeResult::lines

  bool operator==(const Conflict&) const = default;
};

struct MergeResult {
  Lines lines;
  std::vector<Conflict> conflicts;
  bool clean = true;

  bool operator==(const MergeResult&) const = default;
};

struct MergeLabels {
  std::string ours = "ours";
  std::string theirs = "theirs";
};

enum class MergeStrategy : std::uint8_t { ThreeWay, Recursive, Pcdv };

std::optional<MergeStrategy> parse_merge_strategy(std::string_view name);
std::string_view merge_strategy_name(MergeStrategy strategy);

// diff3 over myers matches of base->x and base->y. A region where both sides
// changed the base differently (including adjacent edits with no stable base
// line between them) becomes a conflict; identical changes apply once.
MergeResult three_way_merge(const Lines& base, const Lines& x, const Lines& y, const MergeLabels& labels = {});

using ContentOf = std::function<Lines(const ObjectId&)>;

// Base = the LCA when unique. With several candidates they are merged
// pairwise in ascending id order into a virtual base that keeps any conflict
// markers. Throws UnrelatedHistories when x and y share no ancestor.
MergeResult recursive_merge(const HistoryDag& dag, const ContentOf& content_of, const ObjectId& x,
                            const ObjectId& y, const MergeLabels& labels = {});

// Generation count of a weave line at a revision: 0 when the inserting
// revision is not an ancestor, 1 while the line is live, 2 once a deleting
// revision is an ancestor.
int generation_count(const WeaveLine& line, const std::vector<bool>& ancestry_mask);

// Weave merge driven by generation counts. Throws UnknownRevision.
MergeResult pcdv_merge(const Weave& weave, std::string_view x, std::string_view y, const MergeLabels& labels = {});

struct ScalarMergeResult {
  std::optional<std::string> value;
  std::optional<std::pair<std::string, std::string>> conflict;

  bool clean() const { return value.has_value(); }
  bool operator==(const ScalarMergeResult&) const = default;
};

// Revisions where a scalar attribute was explicitly set, keyed by
// (path, attribute).
using MarkKey = std::pair<std::string, std::string>;
using MarkTable = std::map<MarkKey, std::set<ObjectId>>;

// Marked ancestors of `rev` (rev included) that have no marked descendant
// within rev's ancestry, sorted by id.
std::vector<ObjectId> maximal_marks(const HistoryDag& dag, const std::set<ObjectId>& marks, const ObjectId& rev);

// Throws UnknownCommit, and NoMarks when either side has no marked ancestor.
ScalarMergeResult mark_merge(const HistoryDag& dag, const std::set<ObjectId>& marks, const ObjectId& x,
                             const ObjectId& y, const std::string& v_x, const std::string& v_y);

// Line multiset overlap: |A ∩ B| / max(|A|, |B|). Two empty inputs score 1.
double similarity_index(std::string_view a, std::string_view b);

constexpr double kDefaultRenameThreshold = 0.5;

struct RenameMatch {
  std::string old_path;
  std::string new_path;
  double score = 0;

  bool operator==(const RenameMatch&) const = default;
};

// Greedy best-score pairing of paths only in `before` with paths only in
// `after`. Equal scores go to the smaller old path, then the smaller new
// path. Result is in selection order.
std::vector<RenameMatch> detect_renames(const std::map<std::string, std::string>& before,
                                        const std::map<std::string, std::string>& after,
                                        double threshold = kDefaultRenameThreshold);

}  // namespace vcs
