#include "vcs/graph_log.hpp"

#include <algorithm>
#include <optional>

namespace vcs {

namespace {

using Lanes = std::vector<std::optional<ObjectId>>;

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// One glyph per lane, separated by spaces.
std::string draw(const std::vector<char>& glyphs) {
  std::string s;
  for (std::size_t i = 0; i < glyphs.size(); ++i) {
    if (i) s += ' ';
    s += glyphs[i];
  }
  return s;
}

std::vector<char> verticals(const Lanes& lanes) {
  std::vector<char> g;
  for (const auto& l : lanes) g.push_back(l ? '|' : ' ');
  return g;
}

// Lane k sits at column 2k; moving edges are drawn in the gaps.
std::string blank_row(const Lanes& lanes, std::size_t upto) {
  std::string s(2 * lanes.size() + 2, ' ');
  for (std::size_t k = 0; k < upto && k < lanes.size(); ++k)
    if (lanes[k]) s[2 * k] = '|';
  return s;
}

// Drops lane `j`, lanes to its right slide one column left.
std::string collapse(Lanes& lanes, std::size_t j) {
  std::string s = blank_row(lanes, j);
  for (std::size_t k = j; k < lanes.size(); ++k)
    if (lanes[k]) s[2 * k - 1] = '/';
  lanes.erase(lanes.begin() + static_cast<std::ptrdiff_t>(j));
  return rstrip(s);
}

// `extra` lanes open right of `col`; lanes beyond it slide right.
std::string fork(Lanes& lanes, std::size_t col, const std::vector<ObjectId>& extra) {
  std::string s = blank_row(lanes, col + 1);
  s.resize(2 * (lanes.size() + extra.size()) + 2, ' ');
  for (std::size_t i = 0; i < extra.size(); ++i) s[2 * (col + i) + 1] = '\\';
  for (std::size_t k = col + 1; k < lanes.size(); ++k)
    if (lanes[k]) s[2 * k + 1] = '\\';
  lanes.insert(lanes.begin() + static_cast<std::ptrdiff_t>(col) + 1, extra.begin(), extra.end());
  return rstrip(s);
}

void trim_tail(Lanes& lanes) {
  while (!lanes.empty() && !lanes.back()) lanes.pop_back();
}

}  // namespace

std::vector<std::string> render_graph(const std::vector<LogEntry>& entries) {
  std::vector<std::string> out;
  Lanes lanes;
  for (const auto& e : entries) {
    auto first = std::find(lanes.begin(), lanes.end(), std::optional(e.id));
    std::size_t col;
    if (first == lanes.end()) {
      auto hole = std::find(lanes.begin(), lanes.end(), std::nullopt);
      col = static_cast<std::size_t>(hole - lanes.begin());
      if (hole == lanes.end()) lanes.push_back(e.id);
      else *hole = e.id;
    } else {
      col = static_cast<std::size_t>(first - lanes.begin());
    }
    // branches that meet here join the leftmost lane first
    for (std::size_t j = lanes.size(); j-- > col + 1;)
      if (lanes[j] == e.id) out.push_back(collapse(lanes, j));

    auto g = verticals(lanes);
    g[col] = '*';
    std::string graph = draw(g);
    std::size_t width = std::max<std::size_t>(graph.size(), e.parents.size() > 1 ? 3 : 1);
    graph.resize(width, ' ');
    out.push_back(graph + " " + e.id.short_hex() + " " + e.subject + " (" + e.author + ")");

    if (e.parents.empty()) {
      lanes[col].reset();
      if (col + 1 < lanes.size() && std::any_of(lanes.begin() + static_cast<std::ptrdiff_t>(col) + 1, lanes.end(),
                                                [](const auto& l) { return l.has_value(); }))
        out.push_back(collapse(lanes, col));
      trim_tail(lanes);
      continue;
    }
    lanes[col] = e.parents[0];
    if (e.parents.size() > 1)
      out.push_back(fork(lanes, col, std::vector<ObjectId>(e.parents.begin() + 1, e.parents.end())));
  }
  return out;
}

}  // namespace vcs
