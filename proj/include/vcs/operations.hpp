#pragma once

// Whole-tree operations on a Repository: tree merges, merge/checkout of
// branches, and clone/pull/push between repositories on the local disk.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vcs/merge.hpp"
#include "vcs/repository.hpp"

namespace vcs {

struct MergedFile {
  std::string content;
  FileMode mode = FileMode::Normal;
  bool operator==(const MergedFile&) const = default;
};

struct TreeMergeOptions {
  MergeStrategy strategy = MergeStrategy::Recursive;
  MergeLabels labels;
  // Merge against this commit instead of the common ancestors (always three-way).
  std::optional<ObjectId> base;
  double rename_threshold = kDefaultRenameThreshold;
};

struct TreeMergeResult {
  std::map<std::string, MergedFile> files;
  std::vector<std::string> conflicts;  // sorted paths
  std::vector<std::string> notes;      // renames and other remarks, one line each
  bool clean() const { return conflicts.empty(); }
};

// Merges the trees of `ours` and `theirs`: names through rename detection and
// mark merge, executable bits through mark merge over history, contents by
// the chosen strategy. Throws UnrelatedHistories without a common ancestor.
TreeMergeResult merge_trees(const Repository& repo, const HistoryDag& dag, const ObjectId& ours,
                            const ObjectId& theirs, const TreeMergeOptions& options);

enum class MergeOutcome : std::uint8_t { AlreadyUpToDate, FastForward, Merged, Conflicted };

struct MergeRequest {
  std::optional<MergeStrategy> strategy;  // repository default when unset
  std::optional<std::string> base;        // plumbing: three-way against this revision, one parent
  std::string author;
  std::int64_t timestamp = 0;
  std::string message;  // generated when empty
};

struct MergeReport {
  MergeOutcome outcome = MergeOutcome::AlreadyUpToDate;
  std::optional<ObjectId> commit;  // new HEAD commit, if any
  std::vector<std::string> conflicts;
  std::vector<std::string> notes;
};

// Merges `rev` into HEAD. Throws DirtyTree, ConflictsPending,
// UnrelatedHistories, UnknownRef; InvalidArgument for pcdv without weaves.
MergeReport merge_into_head(Repository& repo, std::string_view rev, const MergeRequest& request);

// Switches HEAD to a branch (or detaches at a commit) and rewrites the
// working tree. With `create`, a new branch at HEAD is made first.
// Throws DirtyTree unless `force`.
void checkout(Repository& repo, const std::string& rev, bool force, bool create);

struct TransferReport {
  std::size_t objects = 0;  // objects copied
  ObjectId head;            // the transferred branch tip
};

// Copies all objects and branches; each source branch is also kept as
// remote/<branch>. Throws UnknownRemote when `source` is not a repository.
Repository clone_repository(const std::filesystem::path& source, const std::filesystem::path& dest);

struct PullReport {
  TransferReport transfer;
  MergeReport merge;
};

// Fetches `branch` (default: the current branch) of `remote` into
// remote/<branch>, then merges it into HEAD.
PullReport pull(Repository& repo, const std::filesystem::path& remote, const std::optional<std::string>& branch,
                const MergeRequest& request);

// Fast-forward-only update of `branch` at `remote` (NonFastForwardPush
// otherwise). A clean remote working tree on that branch is updated too.
TransferReport push(Repository& repo, const std::filesystem::path& remote, const std::optional<std::string>& branch);

}  // namespace vcs
