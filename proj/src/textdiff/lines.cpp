#include "vcs/lines.hpp"

namespace vcs {

Lines split_lines(std::string_view text) {
  Lines lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    lines.emplace_back(text.substr(start, end - start));
    start = end;
  }
  return lines;
}

std::string join_lines(const Lines& lines) {
  std::size_t total = 0;
  for (const auto& line : lines) total += line.size();
  std::string out;
  out.reserve(total);
  for (const auto& line : lines) out += line;
  return out;
}

}  // namespace vcs
