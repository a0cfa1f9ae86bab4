#include "vcs/weave.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"
#include "vcs/textdiff.hpp"

namespace vcs {

namespace {

constexpr std::string_view kHeader = "weave 1";

bool valid_rev_name(std::string_view rev) {
  if (rev.empty()) return false;
  return std::none_of(rev.begin(), rev.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\0';
  });
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    words.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  return words;
}

std::optional<std::size_t> parse_number(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  if (text.size() > 1 && text[0] == '0') return std::nullopt;
  return value;
}

}  // namespace

RevIndex Weave::index_of(std::string_view rev) const {
  auto it = index_.find(std::string(rev));
  if (it == index_.end()) throw Error(Errc::UnknownRevision, std::string(rev));
  return it->second;
}

RevIndex Weave::register_rev(const std::string& rev, std::vector<RevIndex> parents) {
  auto index = static_cast<RevIndex>(revs_.size());
  revs_.push_back({rev, std::move(parents)});
  index_.emplace(rev, index);
  return index;
}

std::vector<bool> Weave::ancestry_mask(RevIndex rev) const {
  std::vector<bool> mask(revs_.size(), false);
  std::vector<RevIndex> stack{rev};
  while (!stack.empty()) {
    RevIndex r = stack.back();
    stack.pop_back();
    if (mask[r]) continue;
    mask[r] = true;
    for (RevIndex p : revs_[r].parents) stack.push_back(p);
  }
  return mask;
}

bool Weave::visible(const WeaveLine& line, const std::vector<bool>& mask) {
  if (!mask[line.insert_rev]) return false;
  return std::none_of(line.delete_revs.begin(), line.delete_revs.end(), [&](RevIndex d) { return mask[d]; });
}

void Weave::add(const std::string& rev, std::span<const std::string> parents, const Lines& content) {
  if (!valid_rev_name(rev)) throw Error(Errc::InvalidArgument, "bad revision name '" + rev + "'");
  if (contains(rev)) throw Error(Errc::DuplicateRevision, rev);
  std::vector<RevIndex> parent_idx;
  for (const auto& p : parents) {
    auto it = index_.find(p);
    if (it == index_.end()) throw Error(Errc::UnknownParent, p);
    if (std::find(parent_idx.begin(), parent_idx.end(), it->second) != parent_idx.end())
      throw Error(Errc::InvalidArgument, "duplicate parent " + p);
    parent_idx.push_back(it->second);
  }
  for (std::size_t k = 0; k + 1 < content.size(); ++k)
    if (!ends_with_newline(content[k])) throw Error(Errc::InvalidArgument, "unterminated line before end of text");

  // Lines visible under the combined ancestry of all parents.
  std::vector<bool> inherited(revs_.size() + 1, false);
  for (RevIndex p : parent_idx) {
    auto mask = ancestry_mask(p);
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) inherited[i] = true;
  }
  Lines view;
  std::vector<std::size_t> view_pos;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (visible(lines_[i], inherited)) {
      view.push_back(lines_[i].text);
      view_pos.push_back(i);
    }
  }

  RevIndex self = register_rev(rev, std::move(parent_idx));
  EditScript script = myers_diff(view, content);

  std::vector<WeaveLine> merged;
  merged.reserve(lines_.size() + content.size());
  std::size_t cursor = 0;
  for (const auto& edit : script) {
    if (edit.op == EditOp::Insert) {
      merged.push_back({edit.line, self, {}});
      continue;
    }
    std::size_t target = view_pos[*edit.a_index];
    while (cursor <= target) merged.push_back(std::move(lines_[cursor++]));
    if (edit.op == EditOp::Delete) merged.back().delete_revs.push_back(self);
  }
  while (cursor < lines_.size()) merged.push_back(std::move(lines_[cursor++]));
  lines_ = std::move(merged);
}

void Weave::add(const std::string& rev, std::optional<std::string> parent, const Lines& content) {
  std::vector<std::string> parents;
  if (parent) parents.push_back(*parent);
  add(rev, std::span<const std::string>(parents), content);
}

Lines Weave::extract(std::string_view rev) const {
  auto mask = ancestry_mask(index_of(rev));
  Lines out;
  for (const auto& line : lines_)
    if (visible(line, mask)) out.push_back(line.text);
  return out;
}

std::vector<AnnotatedLine> Weave::annotate(std::string_view rev) const {
  auto mask = ancestry_mask(index_of(rev));
  std::vector<AnnotatedLine> out;
  for (const auto& line : lines_)
    if (visible(line, mask)) out.push_back({line.text, revs_[line.insert_rev].id});
  return out;
}

std::string Weave::serialize() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& r : revs_) {
    out << "R " << r.id;
    for (RevIndex p : r.parents) out << ' ' << revs_[p].id;
    out << '\n';
  }
  for (const auto& line : lines_) {
    out << "I " << revs_[line.insert_rev].id << ' ' << (ends_with_newline(line.text) ? 'n' : '-') << ' '
        << line_body(line.text) << '\n';
  }
  for (std::size_t i = 0; i < lines_.size(); ++i)
    for (RevIndex d : lines_[i].delete_revs) out << "D " << revs_[d].id << ' ' << i << '\n';
  return out.str();
}

Weave Weave::parse(std::string_view text) {
  auto fail = [](const std::string& why) { return Error(Errc::MalformedWeave, why); };
  if (!text.empty() && text.back() != '\n') throw fail("missing final newline");
  Weave w;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  int section = 0;  // 0 header, 1 revisions, 2 inserts, 3 deletes
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::string where = "line " + std::to_string(line_no);
    if (section == 0) {
      if (line != kHeader) throw fail("bad header");
      section = 1;
      continue;
    }
    if (line.size() < 2 || line[1] != ' ') throw fail(where + ": bad record");
    char tag = line[0];
    if (tag == 'R') {
      if (section != 1) throw fail(where + ": revision after body");
      auto words = split_words(line.substr(2));
      if (words.empty() || !valid_rev_name(words[0])) throw fail(where + ": bad revision");
      std::string id(words[0]);
      if (w.contains(id)) throw fail(where + ": duplicate revision");
      std::vector<RevIndex> parents;
      for (std::size_t k = 1; k < words.size(); ++k) {
        auto it = w.index_.find(std::string(words[k]));
        if (it == w.index_.end()) throw fail(where + ": unknown parent");
        if (std::find(parents.begin(), parents.end(), it->second) != parents.end())
          throw fail(where + ": duplicate parent");
        parents.push_back(it->second);
      }
      w.register_rev(id, std::move(parents));
    } else if (tag == 'I') {
      if (section > 2) throw fail(where + ": insert after deletes");
      section = 2;
      std::string_view rest = line.substr(2);
      std::size_t sp = rest.find(' ');
      if (sp == std::string_view::npos || rest.size() < sp + 3 || rest[sp + 2] != ' ')
        throw fail(where + ": bad insert");
      auto it = w.index_.find(std::string(rest.substr(0, sp)));
      if (it == w.index_.end()) throw fail(where + ": unknown revision");
      char flag = rest[sp + 1];
      if (flag != 'n' && flag != '-') throw fail(where + ": bad newline flag");
      std::string body(rest.substr(sp + 3));
      if (flag == 'n') body.push_back('\n');
      w.lines_.push_back({std::move(body), it->second, {}});
    } else if (tag == 'D') {
      section = 3;
      auto words = split_words(line.substr(2));
      if (words.size() != 2) throw fail(where + ": bad delete");
      auto it = w.index_.find(std::string(words[0]));
      auto target = parse_number(words[1]);
      if (it == w.index_.end() || !target || *target >= w.lines_.size()) throw fail(where + ": bad delete");
      auto& dels = w.lines_[*target].delete_revs;
      if (std::find(dels.begin(), dels.end(), it->second) != dels.end()) throw fail(where + ": duplicate delete");
      dels.push_back(it->second);
    } else {
      throw fail(where + ": unknown record");
    }
  }
  if (section == 0) throw fail("empty weave");
  return w;
}

Weave load_weave(const std::filesystem::path& path) { return Weave::parse(read_file(path)); }

void save_weave(const std::filesystem::path& path, const Weave& weave) {
  write_file_atomic(path, weave.serialize());
}

}  // namespace vcs
