#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vcs {

// A line keeps its terminating '\n'. Only the final line of a text may lack
// it, which makes "x" and "x\n" distinct lines.
using Lines = std::vector<std::string>;

Lines split_lines(std::string_view text);
std::string join_lines(const Lines& lines);

inline bool ends_with_newline(std::string_view line) {
  return !line.empty() && line.back() == '\n';
}

// Line text without its terminator.
inline std::string_view line_body(std::string_view line) {
  return ends_with_newline(line) ? line.substr(0, line.size() - 1) : line;
}

}  // namespace vcs
