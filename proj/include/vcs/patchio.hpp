#pragma once

// Text patches: unified diffs (emit, parse, fuzzy apply), combined diffs of
// merges, and occurrence-count ("pickaxe") history search.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/lines.hpp"
#include "vcs/object.hpp"
#include "vcs/textdiff.hpp"

namespace vcs {

struct HunkLine {
  char tag = ' ';    // ' ', '-' or '+'
  std::string text;  // with its '\n' unless the line ends the file unterminated

  bool operator==(const HunkLine&) const = default;
};

struct Hunk {
  // 1-based starts; a zero length start names the line before the gap.
  std::size_t a_start = 0, a_len = 0;
  std::size_t b_start = 0, b_len = 0;
  std::vector<HunkLine> lines;

  bool operator==(const Hunk&) const = default;
};

struct FilePatch {
  std::string old_path;  // as written after "--- ", e.g. "a/src/x.c" or "/dev/null"
  std::string new_path;
  std::vector<Hunk> hunks;

  bool operator==(const FilePatch&) const = default;
};

struct UnifiedPatch {
  std::vector<FilePatch> files;

  bool operator==(const UnifiedPatch&) const = default;
};

constexpr std::size_t kDefaultContext = 3;
constexpr std::size_t kDefaultMaxFuzz = 2;

struct UnifiedOptions {
  std::size_t context = kDefaultContext;
  DiffAlgorithm algorithm = DiffAlgorithm::Myers;
  // Emit the "---"/"+++" lines even when there are no hunks.
  bool headers_when_equal = false;
};

// Hunks of an edit script; changes closer than 2*context lines share a hunk.
std::vector<Hunk> make_hunks(const EditScript& script, std::size_t context);

std::string format_hunk(const Hunk& hunk);
std::string emit_unified(const Lines& a, const Lines& b, std::string_view label_a, std::string_view label_b,
                         const UnifiedOptions& options = {});

// Lines outside file headers and hunks are ignored. Throws MalformedPatch.
UnifiedPatch parse_unified(std::string_view text);

struct HunkReport {
  std::string path;
  std::size_t hunk = 0;        // 0-based within its file
  std::ptrdiff_t offset = 0;   // applied position minus the position the header implies
  std::size_t fuzz = 0;        // context lines dropped from each edge

  bool operator==(const HunkReport&) const = default;
};

struct ApplyResult {
  std::map<std::string, std::string> files;
  std::vector<HunkReport> hunks;
};

// Path a patch header refers to: a leading "a/" or "b/" is dropped, and
// "/dev/null" yields an empty string.
std::string patch_path(std::string_view header_path);

// Each hunk is tried at its stated position, then at increasing distance
// from it, then again with 1..max_fuzz edge context lines dropped. Hunks of
// a file apply in order and never overlap. Throws HunkFailed.
Lines apply_file_patch(const Lines& source, const FilePatch& patch, std::size_t max_fuzz = kDefaultMaxFuzz,
                       std::vector<HunkReport>* reports = nullptr);
ApplyResult apply_unified(const UnifiedPatch& patch, const std::map<std::string, std::string>& files,
                          std::size_t max_fuzz = kDefaultMaxFuzz);

// Combined diff of a merge result against each of its (two or more)
// parents. Hunks in which the result equals some parent are omitted, so
// only lines the merge itself introduced remain. Empty when nothing is
// left. Throws InvalidArgument for fewer than two parents.
std::string emit_combined(const std::vector<Lines>& parents, const Lines& merged, std::string_view path,
                          std::size_t context = kDefaultContext);

// Non-overlapping occurrences, scanning left to right.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

struct PickaxeCommit {
  ObjectId id;
  std::vector<ObjectId> parents;
};

enum class PickaxeChange : std::uint8_t { Added, Removed };

struct PickaxeHit {
  ObjectId commit;
  std::string path;
  PickaxeChange change = PickaxeChange::Added;
  std::size_t before = 0;  // occurrences in the parent version
  std::size_t after = 0;

  bool operator==(const PickaxeHit&) const = default;
};

using FilesOf = std::function<std::map<std::string, std::string>(const ObjectId&)>;

// Commits (in the given order) whose files change the needle's occurrence
// count relative to a parent; roots compare against an empty tree, merges
// against every parent. At most one hit per (commit, path, direction).
// Throws InvalidArgument for an empty needle.
std::vector<PickaxeHit> pickaxe(const std::vector<PickaxeCommit>& commits, const FilesOf& files_of,
                                std::string_view needle);

}  // namespace vcs
