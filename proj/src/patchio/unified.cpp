#include <algorithm>
#include <charconv>

#include "vcs/error.hpp"
#include "vcs/patchio.hpp"

namespace vcs {

namespace {

bool on_a_side(EditOp op) { return op != EditOp::Insert; }
bool on_b_side(EditOp op) { return op != EditOp::Delete; }

char tag_of(EditOp op) {
  switch (op) {
    case EditOp::Keep:
      return ' ';
    case EditOp::Delete:
      return '-';
    case EditOp::Insert:
      return '+';
  }
  return '?';
}

void append_line(std::string& out, char tag, const std::string& text) {
  out += tag;
  out += text;
  if (!ends_with_newline(text)) out += "\n\\ No newline at end of file\n";
}

std::string range(std::size_t start, std::size_t len) { return std::to_string(start) + "," + std::to_string(len); }

}  // namespace

std::vector<Hunk> make_hunks(const EditScript& script, std::size_t context) {
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < script.size(); ++i)
    if (script[i].op != EditOp::Keep) changes.push_back(i);

  // a/b lines consumed before each script position
  std::vector<std::size_t> a_before(script.size() + 1, 0), b_before(script.size() + 1, 0);
  for (std::size_t i = 0; i < script.size(); ++i) {
    a_before[i + 1] = a_before[i] + (on_a_side(script[i].op) ? 1 : 0);
    b_before[i + 1] = b_before[i] + (on_b_side(script[i].op) ? 1 : 0);
  }

  std::vector<Hunk> hunks;
  for (std::size_t i = 0; i < changes.size();) {
    std::size_t j = i;
    while (j + 1 < changes.size() && changes[j + 1] - changes[j] - 1 <= 2 * context) ++j;
    std::size_t begin = changes[i] >= context ? changes[i] - context : 0;
    std::size_t end = std::min(script.size(), changes[j] + context + 1);
    Hunk h;
    h.a_len = a_before[end] - a_before[begin];
    h.b_len = b_before[end] - b_before[begin];
    h.a_start = a_before[begin] + (h.a_len ? 1 : 0);
    h.b_start = b_before[begin] + (h.b_len ? 1 : 0);
    for (std::size_t k = begin; k < end; ++k) h.lines.push_back({tag_of(script[k].op), script[k].line});
    hunks.push_back(std::move(h));
    i = j + 1;
  }
  return hunks;
}

std::string format_hunk(const Hunk& hunk) {
  std::string out = "@@ -" + range(hunk.a_start, hunk.a_len) + " +" + range(hunk.b_start, hunk.b_len) + " @@\n";
  for (const auto& l : hunk.lines) append_line(out, l.tag, l.text);
  return out;
}

std::string emit_unified(const Lines& a, const Lines& b, std::string_view label_a, std::string_view label_b,
                         const UnifiedOptions& options) {
  auto hunks = make_hunks(diff_lines(options.algorithm, a, b), options.context);
  if (hunks.empty() && !options.headers_when_equal) return {};
  std::string out = "--- " + std::string(label_a) + "\n+++ " + std::string(label_b) + "\n";
  for (const auto& h : hunks) out += format_hunk(h);
  return out;
}

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw Error(Errc::MalformedPatch, "line " + std::to_string(line_no) + ": " + why);
}

// "<start>[,<len>]"
bool parse_range(std::string_view s, std::size_t& start, std::size_t& len) {
  auto comma = s.find(',');
  auto num = [](std::string_view t, std::size_t& v) {
    if (t.empty()) return false;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    return ec == std::errc() && p == t.data() + t.size();
  };
  if (comma == std::string_view::npos) {
    len = 1;
    return num(s, start);
  }
  return num(s.substr(0, comma), start) && num(s.substr(comma + 1), len);
}

bool parse_hunk_header(std::string_view line, Hunk& h) {
  // @@ -a,b +c,d @@ optional text
  if (line.substr(0, 4) != "@@ -") return false;
  auto space = line.find(' ', 4);
  if (space == std::string_view::npos || space + 1 >= line.size() || line[space + 1] != '+') return false;
  auto end = line.find(' ', space + 2);
  if (end == std::string_view::npos || line.substr(end, 3) != " @@") return false;
  return parse_range(line.substr(4, space - 4), h.a_start, h.a_len) &&
         parse_range(line.substr(space + 2, end - space - 2), h.b_start, h.b_len);
}

std::string header_path(std::string_view rest) {
  auto tab = rest.find('\t');
  if (tab != std::string_view::npos) rest = rest.substr(0, tab);
  return std::string(line_body(rest));
}

}  // namespace

UnifiedPatch parse_unified(std::string_view text) {
  Lines lines = split_lines(text);
  UnifiedPatch patch;
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string_view line = lines[i];
    if (line.substr(0, 4) == "--- " && i + 1 < lines.size() && std::string_view(lines[i + 1]).substr(0, 4) == "+++ ") {
      patch.files.push_back({header_path(line.substr(4)), header_path(std::string_view(lines[i + 1]).substr(4)), {}});
      i += 2;
      continue;
    }
    if (line.substr(0, 3) != "@@ ") {
      ++i;  // metadata or commentary
      continue;
    }
    if (patch.files.empty()) malformed(i + 1, "hunk before file header");
    Hunk h;
    if (!parse_hunk_header(line_body(line), h)) malformed(i + 1, "bad hunk header");
    std::size_t need_a = h.a_len, need_b = h.b_len;
    ++i;
    while (need_a > 0 || need_b > 0) {
      if (i >= lines.size()) malformed(i, "hunk ends early");
      std::string_view body = lines[i];
      char tag = body[0];
      if (body == "\n") tag = ' ', body = " \n";  // blank context line with its space trimmed
      if (tag == '\\') {
        if (h.lines.empty() || !ends_with_newline(h.lines.back().text)) malformed(i + 1, "stray no-newline marker");
        h.lines.back().text.pop_back();
        ++i;
        continue;
      }
      bool a = tag == ' ' || tag == '-';
      bool b = tag == ' ' || tag == '+';
      if (!a && !b) malformed(i + 1, "unexpected line in hunk");
      if ((a && need_a == 0) || (b && need_b == 0)) malformed(i + 1, "hunk longer than its header");
      if (a) --need_a;
      if (b) --need_b;
      h.lines.push_back({tag, std::string(body.substr(1))});
      ++i;
    }
    if (i < lines.size() && lines[i][0] == '\\') {
      if (h.lines.empty() || !ends_with_newline(h.lines.back().text)) malformed(i + 1, "stray no-newline marker");
      h.lines.back().text.pop_back();
      ++i;
    }
    patch.files.back().hunks.push_back(std::move(h));
  }
  return patch;
}

std::string patch_path(std::string_view header) {
  if (header == "/dev/null") return {};
  if (header.substr(0, 2) == "a/" || header.substr(0, 2) == "b/") header.remove_prefix(2);
  return std::string(header);
}

namespace {

bool matches_at(const Lines& lines, std::size_t pos, const Lines& pattern) {
  if (pos + pattern.size() > lines.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), lines.begin() + static_cast<std::ptrdiff_t>(pos));
}

}  // namespace

Lines apply_file_patch(const Lines& source, const FilePatch& patch, std::size_t max_fuzz,
                       std::vector<HunkReport>* reports) {
  Lines lines = source;
  std::string path = patch_path(patch.new_path).empty() ? patch_path(patch.old_path) : patch_path(patch.new_path);
  std::ptrdiff_t drift = 0;        // growth from hunks already applied
  std::ptrdiff_t last_offset = 0;  // where the previous hunk landed relative to its header
  std::size_t floor = 0;           // first line not yet covered by an applied hunk

  for (std::size_t hi = 0; hi < patch.hunks.size(); ++hi) {
    const Hunk& h = patch.hunks[hi];
    std::size_t lead = 0, trail = 0;
    while (lead < h.lines.size() && h.lines[lead].tag == ' ') ++lead;
    while (trail < h.lines.size() - lead && h.lines[h.lines.size() - 1 - trail].tag == ' ') ++trail;
    std::ptrdiff_t stated = static_cast<std::ptrdiff_t>(h.a_len == 0 ? h.a_start : h.a_start - 1) + drift;

    bool placed = false;
    for (std::size_t fuzz = 0; fuzz <= max_fuzz && !placed; ++fuzz) {
      std::size_t cut_front = std::min(fuzz, lead), cut_back = std::min(fuzz, trail);
      if (fuzz > 0 && cut_front == 0 && cut_back == 0) break;  // nothing left to drop
      Lines pattern, replacement;
      for (std::size_t k = cut_front; k < h.lines.size() - cut_back; ++k) {
        const auto& l = h.lines[k];
        if (l.tag != '+') pattern.push_back(l.text);
        if (l.tag != '-') replacement.push_back(l.text);
      }
      std::ptrdiff_t expected = stated + static_cast<std::ptrdiff_t>(cut_front);
      std::ptrdiff_t origin = expected + last_offset;
      std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(floor);
      std::ptrdiff_t hi_pos = static_cast<std::ptrdiff_t>(lines.size()) - static_cast<std::ptrdiff_t>(pattern.size());
      if (hi_pos < lo) continue;
      origin = std::clamp(origin, lo, hi_pos);

      std::ptrdiff_t found = -1;
      if (pattern.empty()) {
        found = origin;
      } else {
        for (std::ptrdiff_t d = 0; found < 0 && (origin - d >= lo || origin + d <= hi_pos); ++d) {
          if (origin + d <= hi_pos && matches_at(lines, static_cast<std::size_t>(origin + d), pattern))
            found = origin + d;
          else if (d > 0 && origin - d >= lo && matches_at(lines, static_cast<std::size_t>(origin - d), pattern))
            found = origin - d;
        }
      }
      if (found < 0) continue;

      auto at = lines.begin() + found;
      lines.erase(at, at + static_cast<std::ptrdiff_t>(pattern.size()));
      lines.insert(lines.begin() + found, replacement.begin(), replacement.end());
      last_offset = found - expected;
      drift += static_cast<std::ptrdiff_t>(replacement.size()) - static_cast<std::ptrdiff_t>(pattern.size());
      floor = static_cast<std::size_t>(found) + replacement.size();
      if (reports) reports->push_back({path, hi, found - expected, fuzz});
      placed = true;
    }
    if (!placed)
      throw Error(Errc::HunkFailed, (path.empty() ? std::string("(none)") : path) + " hunk #" + std::to_string(hi + 1));
  }
  return lines;
}

ApplyResult apply_unified(const UnifiedPatch& patch, const std::map<std::string, std::string>& files,
                          std::size_t max_fuzz) {
  ApplyResult result{files, {}};
  for (const auto& fp : patch.files) {
    std::string from = patch_path(fp.old_path);
    std::string to = patch_path(fp.new_path);
    Lines source;
    if (!from.empty()) {
      auto it = result.files.find(from);
      if (it == result.files.end()) throw Error(Errc::HunkFailed, from + ": no such file");
      source = split_lines(it->second);
    }
    Lines out = apply_file_patch(source, fp, max_fuzz, &result.hunks);
    if (!from.empty()) result.files.erase(from);
    if (!to.empty()) result.files[to] = join_lines(out);
  }
  return result;
}

}  // namespace vcs
