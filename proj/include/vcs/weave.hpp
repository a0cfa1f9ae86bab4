#pragma once

// Interleaved single-file history. Every line that ever existed is kept in
// one ordered list, tagged with the revision that inserted it and the
// revisions that deleted it. A line belongs to revision r when its inserting
// revision is an ancestor of r (r included) and none of its deleting
// revisions is.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vcs/lines.hpp"

namespace vcs {

using RevIndex = std::uint32_t;

struct WeaveLine {
  std::string text;  // includes its '\n' unless it was a final unterminated line
  RevIndex insert_rev = 0;
  std::vector<RevIndex> delete_revs;

  bool operator==(const WeaveLine&) const = default;
};

struct AnnotatedLine {
  std::string text;
  std::string rev;

  bool operator==(const AnnotatedLine&) const = default;
};

class Weave {
 public:
  struct Revision {
    std::string id;
    std::vector<RevIndex> parents;
    bool operator==(const Revision&) const = default;
  };

  // Adds `rev` as a child of `parents` (none for a root). The new content is
  // aligned with myers_diff against the lines visible under the union of the
  // parents' ancestries. Throws DuplicateRevision or UnknownParent.
  void add(const std::string& rev, std::span<const std::string> parents, const Lines& content);
  void add(const std::string& rev, std::optional<std::string> parent, const Lines& content);

  // Throw UnknownRevision.
  Lines extract(std::string_view rev) const;
  std::vector<AnnotatedLine> annotate(std::string_view rev) const;

  bool contains(std::string_view rev) const { return index_.count(std::string(rev)) != 0; }
  RevIndex index_of(std::string_view rev) const;
  const std::string& rev_id(RevIndex index) const { return revs_.at(index).id; }
  const std::vector<Revision>& revisions() const { return revs_; }
  const std::vector<WeaveLine>& lines() const { return lines_; }

  // mask[i] is true when revision i is `rev` or one of its ancestors.
  std::vector<bool> ancestry_mask(RevIndex rev) const;
  static bool visible(const WeaveLine& line, const std::vector<bool>& mask);

  std::string serialize() const;
  // Throws MalformedWeave.
  static Weave parse(std::string_view text);

  bool operator==(const Weave& other) const { return revs_ == other.revs_ && lines_ == other.lines_; }

 private:
  std::vector<Revision> revs_;
  std::unordered_map<std::string, RevIndex> index_;
  std::vector<WeaveLine> lines_;

  RevIndex register_rev(const std::string& rev, std::vector<RevIndex> parents);
};

Weave load_weave(const std::filesystem::path& path);
void save_weave(const std::filesystem::path& path, const Weave& weave);

}  // namespace vcs
