#include <algorithm>

#include "vcs/error.hpp"
#include "vcs/patchio.hpp"

namespace vcs {

namespace {

struct Row {
  std::string text;
  bool merged = false;             // a line of the result, else a line lost from some parents
  std::vector<bool> in_parent;     // row counts towards parent i's line numbers
  std::string marks;               // one column per parent
};

struct Lost {
  std::string text;
  std::vector<bool> from;
};

// Lines of parent i removed just before merged line g (g == merged.size() for the end).
std::vector<std::vector<Lost>> lost_lines(const std::vector<Lines>& parents, const Lines& merged,
                                          std::vector<std::vector<bool>>& kept) {
  std::size_t n = parents.size();
  std::vector<std::vector<Lost>> lost(merged.size() + 1);
  kept.assign(n, std::vector<bool>(merged.size(), false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Lines> gaps(merged.size() + 1);
    std::size_t b = 0;
    for (const auto& e : myers_diff(parents[i], merged)) {
      if (e.op == EditOp::Delete) {
        gaps[b].push_back(e.line);
      } else {
        if (e.op == EditOp::Keep) kept[i][b] = true;
        ++b;
      }
    }
    for (std::size_t g = 0; g <= merged.size(); ++g) {
      if (gaps[g].empty()) continue;
      // fold into what earlier parents lost here, sharing equal lines
      Lines acc;
      for (const auto& l : lost[g]) acc.push_back(l.text);
      std::vector<Lost> combined;
      for (const auto& e : myers_diff(acc, gaps[g])) {
        if (e.op == EditOp::Insert) {
          Lost l{e.line, std::vector<bool>(n, false)};
          l.from[i] = true;
          combined.push_back(std::move(l));
        } else {
          combined.push_back(lost[g][*e.a_index]);
          if (e.op == EditOp::Keep) combined.back().from[i] = true;
        }
      }
      lost[g] = std::move(combined);
    }
  }
  return lost;
}

std::string range(std::size_t start, std::size_t len) { return std::to_string(start) + "," + std::to_string(len); }

}  // namespace

std::string emit_combined(const std::vector<Lines>& parents, const Lines& merged, std::string_view path,
                          std::size_t context) {
  if (parents.size() < 2) throw Error(Errc::InvalidArgument, "combined diff needs at least two parents");
  std::size_t n = parents.size();
  std::vector<std::vector<bool>> kept;
  auto lost = lost_lines(parents, merged, kept);

  std::vector<Row> rows;
  for (std::size_t g = 0; g <= merged.size(); ++g) {
    for (const auto& l : lost[g]) {
      Row r{l.text, false, l.from, std::string(n, ' ')};
      for (std::size_t i = 0; i < n; ++i)
        if (l.from[i]) r.marks[i] = '-';
      rows.push_back(std::move(r));
    }
    if (g == merged.size()) break;
    Row r{merged[g], true, std::vector<bool>(n), std::string(n, ' ')};
    for (std::size_t i = 0; i < n; ++i) {
      r.in_parent[i] = kept[i][g];
      if (!kept[i][g]) r.marks[i] = '+';
    }
    rows.push_back(std::move(r));
  }

  // line numbers preceding each row, per parent and for the result
  std::vector<std::vector<std::size_t>> before(n + 1, std::vector<std::size_t>(rows.size() + 1, 0));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) before[i][k + 1] = before[i][k] + (rows[k].in_parent[i] ? 1 : 0);
    before[n][k + 1] = before[n][k] + (rows[k].merged ? 1 : 0);
  }

  std::vector<std::size_t> changed;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k].marks != std::string(n, ' ')) changed.push_back(k);

  std::string body;
  std::string fence(n + 1, '@');
  for (std::size_t c = 0; c < changed.size();) {
    std::size_t d = c;
    while (d + 1 < changed.size() && changed[d + 1] - changed[d] - 1 <= 2 * context) ++d;
    std::size_t begin = changed[c] >= context ? changed[c] - context : 0;
    std::size_t end = std::min(rows.size(), changed[d] + context + 1);
    c = d + 1;

    bool matches_a_parent = false;
    for (std::size_t i = 0; i < n && !matches_a_parent; ++i) {
      bool touched = false;
      for (std::size_t k = begin; k < end; ++k) touched = touched || rows[k].marks[i] != ' ';
      matches_a_parent = !touched;
    }
    if (matches_a_parent) continue;

    body += fence;
    for (std::size_t i = 0; i <= n; ++i) {
      std::size_t len = before[i][end] - before[i][begin];
      body += i < n ? " -" : " +";
      body += range(before[i][begin] + (len ? 1 : 0), len);
    }
    body += " " + fence + "\n";
    for (std::size_t k = begin; k < end; ++k) {
      body += rows[k].marks + rows[k].text;
      if (!ends_with_newline(rows[k].text)) body += "\n\\ No newline at end of file\n";
    }
  }
  if (body.empty()) return {};
  std::string p(path);
  return "diff --cc " + p + "\n--- a/" + p + "\n+++ b/" + p + "\n" + body;
}

}  // namespace vcs
