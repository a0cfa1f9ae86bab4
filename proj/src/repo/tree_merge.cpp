#include <algorithm>
#include <set>
#include <unordered_map>

#include "vcs/error.hpp"
#include "vcs/operations.hpp"

namespace vcs {

namespace {

std::map<std::string, std::string> renames_of(const Repository& repo, const FlatTree& base, const FlatTree& side,
                                              double threshold) {
  std::map<std::string, std::string> before, after;
  for (const auto& [p, f] : base)
    if (!side.count(p)) before[p] = repo.read_blob(f.blob);
  for (const auto& [p, f] : side)
    if (!base.count(p)) after[p] = repo.read_blob(f.blob);
  std::map<std::string, std::string> out;
  if (before.empty() || after.empty()) return out;
  for (const auto& m : detect_renames(before, after, threshold)) out[m.old_path] = m.new_path;
  return out;
}

std::string mode_name(FileMode m) { return m == FileMode::Executable ? "100755" : "100644"; }

class TreeMerger {
 public:
  TreeMerger(const Repository& repo, const HistoryDag& dag, const ObjectId& ours, const ObjectId& theirs,
             const TreeMergeOptions& options)
      : repo_(repo), dag_(dag), ours_(ours), theirs_(theirs), opt_(options) {}

  TreeMergeResult run() {
    if (opt_.base) {
      base_ = *opt_.base;
    } else {
      try {
        lcas_ = dag_.lca_candidates(ours_, theirs_);
      } catch (const Error& e) {
        if (e.code() != Errc::EmptyResult) throw;
        throw Error(Errc::UnrelatedHistories, ours_.short_hex() + " and " + theirs_.short_hex());
      }
      base_ = lcas_.front();  // smallest id
    }
    FlatTree b = repo_.commit_files(base_);
    FlatTree x = repo_.commit_files(ours_);
    FlatTree y = repo_.commit_files(theirs_);
    auto rx = renames_of(repo_, b, x, opt_.rename_threshold);
    auto ry = renames_of(repo_, b, y, opt_.rename_threshold);

    std::set<std::string> claimed_x, claimed_y;
    for (const auto& [p, fb] : b) {
      std::optional<std::string> nx, ny;
      if (x.count(p)) nx = p;
      else if (rx.count(p)) nx = rx[p];
      if (y.count(p)) ny = p;
      else if (ry.count(p)) ny = ry[p];
      if (nx) claimed_x.insert(*nx);
      if (ny) claimed_y.insert(*ny);
      if (!nx && !ny) continue;
      if (!nx || !ny) {
        const std::string& name = nx ? *nx : *ny;
        const FileEntry& kept = nx ? x.at(name) : y.at(name);
        if (kept == fb && name == p) continue;
        place(name, {repo_.read_blob(kept.blob), kept.mode}, "modify/delete");
        continue;
      }
      merge_identity(p, fb, *nx, x.at(*nx), *ny, y.at(*ny));
    }

    for (const auto& [p, fx] : x) {
      if (claimed_x.count(p) || b.count(p)) continue;
      auto it = y.find(p);
      if (it != y.end() && !claimed_y.count(p) && !b.count(p)) {
        claimed_y.insert(p);
        if (it->second.blob == fx.blob) {
          place(p, {repo_.read_blob(fx.blob), fx.mode}, {});
        } else {
          place(p, {repo_.read_blob(fx.blob), fx.mode}, {});
          place(p, {repo_.read_blob(it->second.blob), it->second.mode}, "add/add");
        }
        continue;
      }
      place(p, {repo_.read_blob(fx.blob), fx.mode}, {});
    }
    for (const auto& [p, fy] : y) {
      if (claimed_y.count(p) || b.count(p)) continue;
      place(p, {repo_.read_blob(fy.blob), fy.mode}, {});
    }

    out_.conflicts.assign(conflicted_.begin(), conflicted_.end());
    return std::move(out_);
  }

 private:
  const Repository& repo_;
  const HistoryDag& dag_;
  ObjectId ours_, theirs_, base_;
  std::vector<ObjectId> lcas_;
  const TreeMergeOptions& opt_;
  TreeMergeResult out_;
  std::set<std::string> conflicted_;
  std::unordered_map<ObjectId, FlatTree> files_cache_;

  const FlatTree& files_at(const ObjectId& c) {
    auto it = files_cache_.find(c);
    if (it == files_cache_.end()) it = files_cache_.emplace(c, repo_.commit_files(c)).first;
    return it->second;
  }

  const FileEntry* lookup(const ObjectId& c, const std::vector<std::string>& names) {
    const FlatTree& f = files_at(c);
    for (const auto& n : names) {
      auto it = f.find(n);
      if (it != f.end()) return &it->second;
    }
    return nullptr;
  }

  void conflict(const std::string& path, const std::string& kind) {
    conflicted_.insert(path);
    out_.notes.push_back("CONFLICT (" + kind + "): " + path);
  }

  // A second file landing on an occupied name is merged as an add/add.
  void place(const std::string& name, MergedFile file, const std::string& conflict_kind) {
    auto it = out_.files.find(name);
    if (it != out_.files.end()) {
      if (it->second.content != file.content) {
        auto m = three_way_merge({}, split_lines(it->second.content), split_lines(file.content), opt_.labels);
        it->second.content = join_lines(m.lines);
        conflict(name, conflict_kind.empty() ? "add/add" : conflict_kind);
      }
      return;
    }
    out_.files.emplace(name, std::move(file));
    if (!conflict_kind.empty()) conflict(name, conflict_kind);
  }

  // Without history to consult (explicit base), the usual three-way rule.
  std::optional<std::string> scalar_three_way(const std::string& b, const std::string& vx, const std::string& vy) {
    if (vx == vy || vy == b) return vx;
    if (vx == b) return vy;
    return std::nullopt;
  }

  std::optional<std::string> merge_name(const std::string& p, const std::string& nx, const std::string& ny) {
    if (nx == ny) return nx;
    if (opt_.base) return scalar_three_way(p, nx, ny);
    // proxy marks: the common ancestors carry the base name; a side that
    // renamed marks itself
    std::set<ObjectId> marks(lcas_.begin(), lcas_.end());
    if (nx != p) marks.insert(ours_);
    if (ny != p) marks.insert(theirs_);
    auto r = mark_merge(dag_, marks, ours_, theirs_, nx, ny);
    return r.value;
  }

  std::optional<FileMode> merge_mode(FileMode mb, FileMode mx, FileMode my, const std::vector<std::string>& names) {
    if (mx == my) return mx;
    auto to_mode = [](const std::string& s) { return s == "100755" ? FileMode::Executable : FileMode::Normal; };
    if (opt_.base) {
      auto v = scalar_three_way(mode_name(mb), mode_name(mx), mode_name(my));
      return v ? std::optional(to_mode(*v)) : std::nullopt;
    }
    // a commit marks the bit when it sets a value none of its parents had
    std::set<ObjectId> marks;
    auto visit = dag_.ancestors(ours_);
    for (const auto& c : dag_.ancestors(theirs_)) visit.insert(c);
    for (const auto& c : visit) {
      const FileEntry* here = lookup(c, names);
      if (!here) continue;
      bool inherited = false;
      for (const auto& p : dag_.parents(c)) {
        const FileEntry* there = lookup(p, names);
        if (there && there->mode == here->mode) inherited = true;
      }
      if (!inherited) marks.insert(c);
    }
    try {
      auto r = mark_merge(dag_, marks, ours_, theirs_, mode_name(mx), mode_name(my));
      return r.value ? std::optional(to_mode(*r.value)) : std::nullopt;
    } catch (const Error& e) {
      if (e.code() != Errc::NoMarks) throw;
      auto v = scalar_three_way(mode_name(mb), mode_name(mx), mode_name(my));
      return v ? std::optional(to_mode(*v)) : std::nullopt;
    }
  }

  MergeResult merge_content(const std::string& p, const FileEntry& fb, const std::string& nx, const FileEntry& fx,
                            const std::string& ny, const FileEntry& fy) {
    auto lines_of = [&](const FileEntry& f) { return split_lines(repo_.read_blob(f.blob)); };
    if (fx.blob == fy.blob || fy.blob == fb.blob) return {lines_of(fx), {}, true};
    if (fx.blob == fb.blob) return {lines_of(fy), {}, true};

    MergeStrategy strategy = opt_.base ? MergeStrategy::ThreeWay : opt_.strategy;
    if (strategy == MergeStrategy::Pcdv) {
      if (nx == p && ny == p) {
        Weave w = repo_.file_weave(p);
        if (w.contains(ours_.hex()) && w.contains(theirs_.hex()))
          return pcdv_merge(w, ours_.hex(), theirs_.hex(), opt_.labels);
      }
      out_.notes.push_back("three-way fallback for " + nx + ": no common weave history");
      strategy = MergeStrategy::ThreeWay;
    }
    if (strategy == MergeStrategy::Recursive) {
      std::vector<std::string> names{nx, ny, p};
      ContentOf content_of = [&, names](const ObjectId& c) {
        const FileEntry* f = lookup(c, names);
        return f ? split_lines(repo_.read_blob(f->blob)) : Lines{};
      };
      return recursive_merge(dag_, content_of, ours_, theirs_, opt_.labels);
    }
    return three_way_merge(lines_of(fb), lines_of(fx), lines_of(fy), opt_.labels);
  }

  void merge_identity(const std::string& p, const FileEntry& fb, const std::string& nx, const FileEntry& fx,
                      const std::string& ny, const FileEntry& fy) {
    auto name = merge_name(p, nx, ny);
    if (nx != p || ny != p) {
      if (name) out_.notes.push_back("rename " + p + " -> " + *name);
    }
    MergeResult content = merge_content(p, fb, nx, fx, ny, fy);
    auto mode = merge_mode(fb.mode, fx.mode, fy.mode, {nx, ny, p});
    std::string target = name.value_or(nx);
    place(target, {join_lines(content.lines), mode.value_or(fx.mode)}, content.clean ? "" : "content");
    if (!mode) conflict(target, "mode");
    if (!name) {
      conflict(target, "rename/rename");
      place(ny, {repo_.read_blob(fy.blob), fy.mode}, "rename/rename");
    }
  }
};

std::string label_for(const std::string& name, const ObjectId& id) { return name + " " + id.short_hex(); }

FlatTree materialize(Repository& repo, const TreeMergeResult& result) {
  FlatTree out;
  for (const auto& [path, f] : result.files) out[path] = {repo.objects().put(ObjectKind::Blob, f.content), f.mode};
  return out;
}

}  // namespace

TreeMergeResult merge_trees(const Repository& repo, const HistoryDag& dag, const ObjectId& ours,
                            const ObjectId& theirs, const TreeMergeOptions& options) {
  return TreeMerger(repo, dag, ours, theirs, options).run();
}

MergeReport merge_into_head(Repository& repo, std::string_view rev, const MergeRequest& request) {
  if (repo.merge_state()) throw Error(Errc::ConflictsPending, "a merge is in progress; resolve and commit it first");
  MergeStrategy strategy = request.strategy.value_or(repo.config().strategy);
  if (strategy == MergeStrategy::Pcdv && repo.config().storage != StorageBackend::Weave)
    throw Error(Errc::InvalidArgument, "pcdv needs the weave storage backend");
  if (repo.dirty()) throw Error(Errc::DirtyTree, "commit or discard local changes before merging");

  ObjectId other = repo.resolve(rev);
  auto head = repo.head_commit();
  auto branch = repo.head_branch();
  FlatTree current = head ? repo.commit_files(*head) : FlatTree{};
  MergeReport report;

  auto move_head = [&](const ObjectId& id) {
    if (branch) repo.refs().set(*branch, id);
    else repo.set_head_detached(id);
  };

  if (!head) {
    repo.write_worktree(current, repo.commit_files(other));
    move_head(other);
    report.outcome = MergeOutcome::FastForward;
    report.commit = other;
    return report;
  }

  TreeMergeOptions opts;
  opts.strategy = strategy;
  opts.labels = {label_for(branch.value_or("HEAD"), *head), label_for(std::string(rev), other)};

  if (request.base) {
    ObjectId base = repo.resolve(*request.base);
    HistoryDag dag = repo.load_dag({other, base});
    opts.base = base;
    opts.strategy = MergeStrategy::ThreeWay;
    TreeMergeResult result = merge_trees(repo, dag, *head, other, opts);
    FlatTree target = materialize(repo, result);
    repo.write_worktree(current, target);
    report.notes = result.notes;
    if (!result.clean()) {
      report.outcome = MergeOutcome::Conflicted;
      report.conflicts = result.conflicts;
      return report;
    }
    std::string message = request.message.empty() ? repo.read_commit(other).message : request.message;
    report.commit = repo.commit_tree(repo.write_flat_tree(target), {*head}, request.author, request.timestamp, message);
    report.outcome = MergeOutcome::Merged;
    return report;
  }

  HistoryDag dag = repo.load_dag({other});
  switch (dag.ff_status(*head, other)) {
    case FfStatus::AlreadyUpToDate:
      report.outcome = MergeOutcome::AlreadyUpToDate;
      return report;
    case FfStatus::FastForward:
      repo.write_worktree(current, repo.commit_files(other));
      move_head(other);
      report.outcome = MergeOutcome::FastForward;
      report.commit = other;
      return report;
    case FfStatus::NeedsMerge:
      break;
  }

  TreeMergeResult result = merge_trees(repo, dag, *head, other, opts);
  FlatTree target = materialize(repo, result);
  repo.write_worktree(current, target);
  report.notes = result.notes;
  if (!result.clean()) {
    repo.write_merge_state({other, result.conflicts});
    report.outcome = MergeOutcome::Conflicted;
    report.conflicts = result.conflicts;
    return report;
  }
  std::string message = request.message;
  if (message.empty()) message = "Merge " + std::string(rev) + " into " + branch.value_or("HEAD") + "\n";
  report.commit =
      repo.commit_tree(repo.write_flat_tree(target), {*head, other}, request.author, request.timestamp, message);
  report.outcome = MergeOutcome::Merged;
  return report;
}

void checkout(Repository& repo, const std::string& rev, bool force, bool create) {
  if (!force) {
    if (repo.merge_state()) throw Error(Errc::ConflictsPending, "a merge is in progress");
    if (repo.dirty()) throw Error(Errc::DirtyTree, "local changes would be overwritten (use --force)");
  }
  auto head = repo.head_commit();
  if (create) {
    if (!RefStore::valid_name(rev)) throw Error(Errc::InvalidArgument, "invalid branch name '" + rev + "'");
    if (repo.refs().exists(rev)) throw Error(Errc::InvalidArgument, "branch '" + rev + "' already exists");
    if (head) repo.refs().set(rev, *head);
    repo.set_head_branch(rev);
    return;
  }

  std::optional<std::string> branch;
  ObjectId target_id;
  if (rev.rfind("remote/", 0) != 0 && RefStore::valid_name(rev) && repo.refs().exists(rev)) {
    branch = rev;
    target_id = *repo.refs().get(rev);
  } else {
    target_id = repo.resolve(rev);
  }
  FlatTree target = repo.commit_files(target_id);
  FlatTree current = head ? repo.commit_files(*head) : FlatTree{};
  if (force) {
    // rewrite whatever differs on disk among tracked paths; untracked files stay
    FlatTree disk = repo.scan_worktree(false);
    FlatTree seen;
    for (const auto& [p, f] : disk)
      if (current.count(p) || target.count(p)) seen[p] = f;
    current = seen;
    repo.clear_merge_state();
  }
  repo.write_worktree(current, target);
  if (branch) repo.set_head_branch(*branch);
  else repo.set_head_detached(target_id);
}

}  // namespace vcs
