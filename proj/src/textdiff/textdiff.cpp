#include "vcs/textdiff.hpp"

#include <algorithm>
#include <cstddef>
#include <unordered_map>

#include "vcs/error.hpp"

namespace vcs {

namespace {

using Tokens = std::vector<std::uint32_t>;

class Differ {
 public:
  Differ(const Lines& a, const Lines& b) {
    std::unordered_map<std::string_view, std::uint32_t> ids;
    auto intern = [&](const Lines& lines, Tokens& out) {
      out.reserve(lines.size());
      for (const auto& line : lines)
        out.push_back(ids.try_emplace(line, static_cast<std::uint32_t>(ids.size())).first->second);
    };
    intern(a, a_);
    intern(b, b_);
  }

  std::vector<LineMatch> myers() {
    std::vector<LineMatch> out;
    myers_range(0, a_.size(), 0, b_.size(), out);
    return out;
  }

  std::vector<LineMatch> patience() {
    std::vector<LineMatch> out;
    patience_range(0, a_.size(), 0, b_.size(), out);
    return out;
  }

  std::vector<LineMatch> bdiff() {
    index_b();
    std::vector<LineMatch> out;
    bdiff_range(0, a_.size(), 0, b_.size(), out);
    return out;
  }

  std::vector<LineMatch> unique_anchors(std::size_t alo, std::size_t ahi, std::size_t blo,
                                        std::size_t bhi) const;
  CommonRun longest_run(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) const;

  void index_b() {
    for (std::size_t j = 0; j < b_.size(); ++j) b_positions_[b_[j]].push_back(j);
  }

 private:
  struct Split {
    std::size_t x;
    std::size_t y;
  };

  void myers_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                   std::vector<LineMatch>& out);
  bool bisect(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi, Split& split);
  void patience_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                      std::vector<LineMatch>& out);
  void bdiff_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                   std::vector<LineMatch>& out);

  Tokens a_;
  Tokens b_;
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> b_positions_;
  std::vector<std::ptrdiff_t> forward_;
  std::vector<std::ptrdiff_t> reverse_;
};

void Differ::myers_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                         std::vector<LineMatch>& out) {
  while (alo < ahi && blo < bhi && a_[alo] == b_[blo]) out.push_back({alo++, blo++});
  std::size_t tail = 0;
  while (alo < ahi && blo < bhi && a_[ahi - 1] == b_[bhi - 1]) {
    --ahi;
    --bhi;
    ++tail;
  }
  if (alo < ahi && blo < bhi) {
    Split split{};
    if (bisect(alo, ahi, blo, bhi, split)) {
      myers_range(alo, split.x, blo, split.y, out);
      myers_range(split.x, ahi, split.y, bhi, out);
    }
  }
  for (std::size_t t = 0; t < tail; ++t) out.push_back({ahi + t, bhi + t});
}

// Runs the forward and reverse searches in lockstep until their furthest
// reaching paths overlap on a diagonal; the overlap point lies on a shortest
// edit path and splits the problem in two.
bool Differ::bisect(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                    Split& split) {
  const auto n = static_cast<std::ptrdiff_t>(ahi - alo);
  const auto m = static_cast<std::ptrdiff_t>(bhi - blo);
  const std::ptrdiff_t max_d = (n + m + 1) / 2;
  const std::ptrdiff_t offset = max_d + 1;
  const std::ptrdiff_t length = 2 * max_d + 3;
  forward_.assign(static_cast<std::size_t>(length), -1);
  reverse_.assign(static_cast<std::size_t>(length), -1);
  auto& vf = forward_;
  auto& vr = reverse_;
  auto at = [](std::vector<std::ptrdiff_t>& v, std::ptrdiff_t i) -> std::ptrdiff_t& {
    return v[static_cast<std::size_t>(i)];
  };
  at(vf, offset + 1) = 0;
  at(vr, offset + 1) = 0;

  const std::ptrdiff_t delta = n - m;
  const bool odd = (delta % 2) != 0;
  const auto* a = a_.data() + alo;
  const auto* b = b_.data() + blo;
  std::ptrdiff_t f_start = 0, f_end = 0, r_start = 0, r_end = 0;

  for (std::ptrdiff_t d = 0; d < max_d + 1; ++d) {
    for (std::ptrdiff_t k = -d + f_start; k <= d - f_end; k += 2) {
      std::ptrdiff_t x = (k == -d || (k != d && at(vf, offset + k - 1) < at(vf, offset + k + 1)))
                             ? at(vf, offset + k + 1)
                             : at(vf, offset + k - 1) + 1;
      std::ptrdiff_t y = x - k;
      while (x < n && y < m && a[x] == b[y]) ++x, ++y;
      at(vf, offset + k) = x;
      if (x > n) {
        f_end += 2;
      } else if (y > m) {
        f_start += 2;
      } else if (odd) {
        std::ptrdiff_t rk = offset + delta - k;
        if (rk >= 0 && rk < length && at(vr, rk) != -1 && x >= n - at(vr, rk)) {
          split = {alo + static_cast<std::size_t>(x), blo + static_cast<std::size_t>(y)};
          return true;
        }
      }
    }
    for (std::ptrdiff_t k = -d + r_start; k <= d - r_end; k += 2) {
      std::ptrdiff_t x = (k == -d || (k != d && at(vr, offset + k - 1) < at(vr, offset + k + 1)))
                             ? at(vr, offset + k + 1)
                             : at(vr, offset + k - 1) + 1;
      std::ptrdiff_t y = x - k;
      while (x < n && y < m && a[n - x - 1] == b[m - y - 1]) ++x, ++y;
      at(vr, offset + k) = x;
      if (x > n) {
        r_end += 2;
      } else if (y > m) {
        r_start += 2;
      } else if (!odd) {
        std::ptrdiff_t fk = offset + delta - k;
        if (fk >= 0 && fk < length && at(vf, fk) != -1) {
          std::ptrdiff_t fx = at(vf, fk);
          std::ptrdiff_t fy = fx - (fk - offset);
          if (fx >= n - x) {
            split = {alo + static_cast<std::size_t>(fx), blo + static_cast<std::size_t>(fy)};
            return true;
          }
        }
      }
    }
  }
  return false;
}

std::vector<LineMatch> Differ::unique_anchors(std::size_t alo, std::size_t ahi, std::size_t blo,
                                              std::size_t bhi) const {
  struct Seen {
    std::size_t count = 0;
    std::size_t pos = 0;
  };
  std::unordered_map<std::uint32_t, Seen> in_a, in_b;
  for (std::size_t i = alo; i < ahi; ++i) {
    auto& s = in_a[a_[i]];
    ++s.count;
    s.pos = i;
  }
  for (std::size_t j = blo; j < bhi; ++j) {
    auto& s = in_b[b_[j]];
    ++s.count;
    s.pos = j;
  }

  // Unique-in-both lines in `a` order; their `b` positions form the
  // sequence whose longest increasing subsequence is wanted.
  std::vector<LineMatch> candidates;
  for (std::size_t i = alo; i < ahi; ++i) {
    if (in_a[a_[i]].count != 1) continue;
    auto it = in_b.find(a_[i]);
    if (it != in_b.end() && it->second.count == 1) candidates.push_back({i, it->second.pos});
  }

  // Patience sorting: each pile keeps its top card; a card goes on the
  // leftmost pile whose top exceeds it and remembers the top of the pile to
  // its left.
  std::vector<std::size_t> pile_tops;
  std::vector<std::ptrdiff_t> back(candidates.size(), -1);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto pile = std::lower_bound(pile_tops.begin(), pile_tops.end(), candidates[c].b,
                                 [&](std::size_t top, std::size_t value) {
                                   return candidates[top].b < value;
                                 });
    if (pile != pile_tops.begin()) back[c] = static_cast<std::ptrdiff_t>(*(pile - 1));
    if (pile == pile_tops.end()) {
      pile_tops.push_back(c);
    } else {
      *pile = c;
    }
  }

  std::vector<LineMatch> anchors;
  if (pile_tops.empty()) return anchors;
  for (auto c = static_cast<std::ptrdiff_t>(pile_tops.back()); c >= 0; c = back[c])
    anchors.push_back(candidates[static_cast<std::size_t>(c)]);
  std::reverse(anchors.begin(), anchors.end());
  return anchors;
}

void Differ::patience_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                            std::vector<LineMatch>& out) {
  if (alo == ahi || blo == bhi) return;
  auto anchors = unique_anchors(alo, ahi, blo, bhi);
  if (anchors.empty()) {
    myers_range(alo, ahi, blo, bhi, out);
    return;
  }
  for (const auto& anchor : anchors) {
    patience_range(alo, anchor.a, blo, anchor.b, out);
    out.push_back(anchor);
    alo = anchor.a + 1;
    blo = anchor.b + 1;
  }
  patience_range(alo, ahi, blo, bhi, out);
}

CommonRun Differ::longest_run(std::size_t alo, std::size_t ahi, std::size_t blo,
                              std::size_t bhi) const {
  CommonRun best{alo, blo, 0};
  // run_len[j] = length of the common run ending at (i - 1, j).
  std::unordered_map<std::size_t, std::size_t> run_len, next_len;
  for (std::size_t i = alo; i < ahi; ++i) {
    next_len.clear();
    auto it = b_positions_.find(a_[i]);
    if (it != b_positions_.end()) {
      const auto& positions = it->second;
      for (auto p = std::lower_bound(positions.begin(), positions.end(), blo);
           p != positions.end() && *p < bhi; ++p) {
        std::size_t j = *p;
        std::size_t k = 1;
        if (j > blo) {
          auto prev = run_len.find(j - 1);
          if (prev != run_len.end()) k = prev->second + 1;
        }
        next_len[j] = k;
        if (k > best.length) best = {i + 1 - k, j + 1 - k, k};
      }
    }
    std::swap(run_len, next_len);
  }
  return best;
}

void Differ::bdiff_range(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                         std::vector<LineMatch>& out) {
  if (alo == ahi || blo == bhi) return;
  auto run = longest_run(alo, ahi, blo, bhi);
  if (run.length == 0) return;
  bdiff_range(alo, run.a_start, blo, run.b_start, out);
  for (std::size_t t = 0; t < run.length; ++t) out.push_back({run.a_start + t, run.b_start + t});
  bdiff_range(run.a_start + run.length, ahi, run.b_start + run.length, bhi, out);
}

EditScript render_script(const Lines& a, const Lines& b, const std::vector<LineMatch>& matches) {
  EditScript script;
  script.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto flush_gap = [&](std::size_t a_end, std::size_t b_end) {
    for (; i < a_end; ++i) script.push_back({EditOp::Delete, i, std::nullopt, a[i]});
    for (; j < b_end; ++j) script.push_back({EditOp::Insert, std::nullopt, j, b[j]});
  };
  for (const auto& match : matches) {
    flush_gap(match.a, match.b);
    script.push_back({EditOp::Keep, match.a, match.b, a[match.a]});
    i = match.a + 1;
    j = match.b + 1;
  }
  flush_gap(a.size(), b.size());
  return script;
}

}  // namespace

std::optional<DiffAlgorithm> parse_diff_algorithm(std::string_view name) {
  if (name == "myers") return DiffAlgorithm::Myers;
  if (name == "patience") return DiffAlgorithm::Patience;
  if (name == "bdiff") return DiffAlgorithm::Bdiff;
  return std::nullopt;
}

std::string_view diff_algorithm_name(DiffAlgorithm algorithm) {
  switch (algorithm) {
    case DiffAlgorithm::Myers: return "myers";
    case DiffAlgorithm::Patience: return "patience";
    case DiffAlgorithm::Bdiff: return "bdiff";
  }
  return "?";
}

EditScript myers_diff(const Lines& a, const Lines& b) {
  return render_script(a, b, Differ(a, b).myers());
}

EditScript patience_diff(const Lines& a, const Lines& b) {
  return render_script(a, b, Differ(a, b).patience());
}

EditScript bdiff(const Lines& a, const Lines& b) {
  return render_script(a, b, Differ(a, b).bdiff());
}

EditScript diff_lines(DiffAlgorithm algorithm, const Lines& a, const Lines& b) {
  switch (algorithm) {
    case DiffAlgorithm::Myers: return myers_diff(a, b);
    case DiffAlgorithm::Patience: return patience_diff(a, b);
    case DiffAlgorithm::Bdiff: return bdiff(a, b);
  }
  return myers_diff(a, b);
}

Lines apply_edit_script(const Lines& a, const EditScript& script) {
  Lines out;
  std::size_t cursor = 0;
  auto mismatch = [](std::size_t index) {
    return Error(Errc::ScriptMismatch, "edit script does not match input at line " +
                                           std::to_string(index));
  };
  for (const auto& edit : script) {
    if (edit.op == EditOp::Insert) {
      out.push_back(edit.line);
      continue;
    }
    if (!edit.a_index || *edit.a_index != cursor || cursor >= a.size() || a[cursor] != edit.line)
      throw mismatch(edit.a_index.value_or(cursor));
    if (edit.op == EditOp::Keep) out.push_back(a[cursor]);
    ++cursor;
  }
  if (cursor != a.size()) throw mismatch(cursor);
  return out;
}

std::size_t edit_cost(const EditScript& script) {
  return static_cast<std::size_t>(std::count_if(
      script.begin(), script.end(), [](const Edit& e) { return e.op != EditOp::Keep; }));
}

std::vector<LineMatch> script_matches(const EditScript& script) {
  std::vector<LineMatch> matches;
  for (const auto& edit : script)
    if (edit.op == EditOp::Keep) matches.push_back({*edit.a_index, *edit.b_index});
  return matches;
}

std::vector<LineMatch> patience_anchors(const Lines& a, const Lines& b) {
  return Differ(a, b).unique_anchors(0, a.size(), 0, b.size());
}

CommonRun longest_common_run(const Lines& a, const Lines& b) {
  Differ differ(a, b);
  differ.index_b();
  return differ.longest_run(0, a.size(), 0, b.size());
}

}  // namespace vcs
