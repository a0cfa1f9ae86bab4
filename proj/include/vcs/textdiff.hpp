#pragma once

// Line-level difference algorithms.
//
// All three algorithms reduce to a list of matched (a, b) line pairs; the
// edit script is then rendered the same way for each, with every gap
// between matches emitted as its deletions followed by its insertions.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/lines.hpp"

namespace vcs {

enum class EditOp : std::uint8_t { Keep, Insert, Delete };

struct Edit {
  EditOp op;
  std::optional<std::size_t> a_index;  // Keep, Delete
  std::optional<std::size_t> b_index;  // Keep, Insert
  std::string line;

  bool operator==(const Edit&) const = default;
};

using EditScript = std::vector<Edit>;

enum class DiffAlgorithm : std::uint8_t { Myers, Patience, Bdiff };

std::optional<DiffAlgorithm> parse_diff_algorithm(std::string_view name);
std::string_view diff_algorithm_name(DiffAlgorithm algorithm);

// Shortest edit script via bidirectional (middle snake) search.
EditScript myers_diff(const Lines& a, const Lines& b);
// LCS over lines unique to both sides, recursing between anchors; regions
// without unique common lines fall back to myers_diff.
EditScript patience_diff(const Lines& a, const Lines& b);
// Recursion on the longest common contiguous run of lines.
EditScript bdiff(const Lines& a, const Lines& b);

EditScript diff_lines(DiffAlgorithm algorithm, const Lines& a, const Lines& b);

// Throws Errc::ScriptMismatch when a Keep/Delete does not line up with `a`.
Lines apply_edit_script(const Lines& a, const EditScript& script);

// Number of Insert plus Delete operations.
std::size_t edit_cost(const EditScript& script);

struct LineMatch {
  std::size_t a;
  std::size_t b;
  bool operator==(const LineMatch&) const = default;
};

// Matched pairs (Keep operations) of a script, in order.
std::vector<LineMatch> script_matches(const EditScript& script);

// Top-level patience anchors: the longest increasing run of lines that
// occur exactly once in each input.
std::vector<LineMatch> patience_anchors(const Lines& a, const Lines& b);

struct CommonRun {
  std::size_t a_start = 0;
  std::size_t b_start = 0;
  std::size_t length = 0;
  bool operator==(const CommonRun&) const = default;
};

// Longest common contiguous run of lines; ties go to the earliest start in
// `a`, then in `b`. length == 0 when no line is shared.
CommonRun longest_common_run(const Lines& a, const Lines& b);

}  // namespace vcs
