#pragma once

#include "vcs/merge.hpp"

namespace vcs::detail {

class MergeBuilder {
 public:
  explicit MergeBuilder(const MergeLabels& labels) : labels_(labels) {}

  void take(const Lines& lines) { out_.lines.insert(out_.lines.end(), lines.begin(), lines.end()); }
  void take(const std::string& line) { out_.lines.push_back(line); }

  void conflict(const Lines& ours, const Lines& theirs) {
    Conflict c{ours, theirs, out_.lines.size()};
    out_.lines.push_back("<<<<<<< " + labels_.ours + "\n");
    append_terminated(ours);
    out_.lines.push_back("=======\n");
    append_terminated(theirs);
    out_.lines.push_back(">>>>>>> " + labels_.theirs + "\n");
    out_.conflicts.push_back(std::move(c));
    out_.clean = false;
  }

  MergeResult finish() { return std::move(out_); }

 private:
  const MergeLabels& labels_;
  MergeResult out_;

  void append_terminated(const Lines& lines) {
    for (const auto& l : lines) out_.lines.push_back(ends_with_newline(l) ? l : l + "\n");
  }
};

}  // namespace vcs::detail
