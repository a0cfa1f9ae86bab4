#include "vcs/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

#include "vcs/bytes.hpp"
#include "vcs/graph_log.hpp"
#include "vcs/operations.hpp"
#include "vcs/patchio.hpp"
#include "vcs/repository.hpp"

namespace vcs {

namespace fs = std::filesystem;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConflictsPending:
    case Errc::NonFastForwardPush:
    case Errc::DirtyTree:
    case Errc::LockHeld:
    case Errc::UnrelatedHistories:
    case Errc::HunkFailed:
      return 1;
    case Errc::CorruptObject:
    case Errc::CorruptPack:
    case Errc::CorruptHunk:
    case Errc::MalformedWeave:
    case Errc::DanglingReference:
      return 3;
    default:
      return 2;
  }
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  fs::path cwd;

  fs::path path(const std::string& p) const {
    fs::path q(p);
    return (q.is_absolute() ? q : cwd / q).lexically_normal();
  }
  Repository repo() const { return Repository::discover(cwd); }
};

std::string resolve_author(const std::string& flag, const Repository& repo) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VCS_AUTHOR"); env && *env) return env;
  if (!repo.config().user.empty()) return repo.config().user;
  return "anonymous";
}

std::int64_t resolve_date(const std::optional<std::int64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VCS_DATE"); env && *env) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "VCS_DATE must be seconds since the epoch");
    }
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

std::string format_date(std::int64_t ts) {
  std::time_t t = static_cast<std::time_t>(ts);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%d %H:%M:%S") << " +0000";
  return s.str();
}

std::string repo_relative(const Context& ctx, const Repository& repo, const std::string& p) {
  return fs::relative(ctx.path(p), repo.root()).lexically_normal().generic_string();
}

void print_merge_report(const Context& ctx, const MergeReport& r, MergeStrategy strategy) {
  for (const auto& n : r.notes) ctx.out << n << "\n";
  switch (r.outcome) {
    case MergeOutcome::AlreadyUpToDate:
      ctx.out << "Already up to date.\n";
      break;
    case MergeOutcome::FastForward:
      ctx.out << "Fast-forward to " << r.commit->short_hex() << "\n";
      break;
    case MergeOutcome::Merged:
      ctx.out << "Merge made by " << merge_strategy_name(strategy) << ": " << r.commit->short_hex() << "\n";
      break;
    case MergeOutcome::Conflicted:
      ctx.out << "Automatic merge failed; fix conflicts and commit the result.\n";
      break;
  }
}

// path -> content, for a commit or (with no commit) the working tree
std::map<std::string, std::string> snapshot(Repository& repo, const std::optional<ObjectId>& commit) {
  std::map<std::string, std::string> files;
  if (commit) {
    for (const auto& [p, f] : repo.commit_files(*commit)) files[p] = repo.read_blob(f.blob);
  } else {
    for (const auto& [p, f] : repo.scan_worktree(false)) files[p] = read_file(repo.root() / p);
  }
  return files;
}

std::string text_with_newline(std::string s) {
  if (!s.empty() && s.back() != '\n') s += '\n';
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const fs::path& cwd) {
  Context ctx{out, err, cwd};
  CLI::App app{"vcs: a small distributed version control system", "vcs"};
  app.require_subcommand(1);

  // init
  auto* init = app.add_subcommand("init", "Create an empty repository");
  std::string init_dir = ".";
  std::string init_storage = "weave", init_strategy = "recursive", init_user;
  init->add_option("dir", init_dir, "Directory (created when missing)");
  init->add_option("--storage", init_storage, "File history backend: weave or revlog");
  init->add_option("--strategy", init_strategy, "Default merge strategy");
  init->add_option("--user", init_user, "Default author");

  // commit
  auto* commit = app.add_subcommand("commit", "Record the working tree");
  std::string message, author;
  std::optional<std::int64_t> date;
  std::vector<std::string> commit_paths;
  commit->add_option("-m,--message", message, "Commit message")->required();
  commit->add_option("--author", author, "Author (default: VCS_AUTHOR, then config user)");
  commit->add_option("--date", date, "Seconds since the epoch (default: VCS_DATE, then now)");
  commit->add_option("paths", commit_paths, "Limit the commit to these paths");

  // branch
  auto* branch = app.add_subcommand("branch", "List or create branches");
  std::string branch_name, branch_start;
  bool branch_delete = false;
  branch->add_option("name", branch_name);
  branch->add_option("start", branch_start, "Start point (default HEAD)");
  branch->add_flag("-d,--delete", branch_delete);

  // checkout
  auto* co = app.add_subcommand("checkout", "Switch branches or detach at a commit");
  std::string co_target;
  bool co_force = false, co_create = false;
  co->add_option("target", co_target)->required();
  co->add_flag("-f,--force", co_force, "Discard local changes");
  co->add_flag("-b", co_create, "Create the branch at HEAD first");

  auto* status = app.add_subcommand("status", "Show working tree changes");

  // log
  auto* log = app.add_subcommand("log", "Show history");
  bool log_graph = false;
  std::string log_rev = "HEAD";
  log->add_flag("--graph", log_graph, "Draw the commit graph");
  log->add_option("rev", log_rev);

  // diff
  auto* diff = app.add_subcommand("diff", "Compare commits or the working tree");
  std::vector<std::string> diff_revs;
  std::vector<std::string> diff_paths;
  std::string diff_algorithm = "myers";
  std::string diff_cc;
  std::size_t diff_context = kDefaultContext;
  diff->add_option("revs", diff_revs, "Zero, one or two revisions")->expected(0, 2);
  diff->add_option("-p,--path", diff_paths, "Limit to paths");
  diff->add_option("--algorithm", diff_algorithm, "myers, patience or bdiff");
  diff->add_option("--cc", diff_cc, "Combined diff of a merge commit");
  diff->add_option("-U,--context", diff_context);

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Show the revision that last changed each line");
  std::string ann_path, ann_rev = "HEAD";
  annotate->add_option("path", ann_path)->required();
  annotate->add_option("--rev", ann_rev);

  // pickaxe
  auto* pick = app.add_subcommand("pickaxe", "Find commits that add or remove a string");
  std::string pick_needle, pick_rev = "HEAD";
  pick->add_option("needle", pick_needle)->required();
  pick->add_option("rev", pick_rev);

  // gc
  auto* gc = app.add_subcommand("gc", "Pack objects");
  bool gc_prune = false;
  gc->add_flag("--prune", gc_prune, "Drop unreachable objects");

  // cat-file
  auto* cat = app.add_subcommand("cat-file", "Show an object");
  std::string cat_id;
  bool cat_type = false, cat_pretty = false, cat_size = false;
  cat->add_option("object", cat_id)->required();
  cat->add_flag("-t", cat_type);
  cat->add_flag("-p", cat_pretty);
  cat->add_flag("-s", cat_size);

  // apply
  auto* apply = app.add_subcommand("apply", "Apply a unified diff to the working tree");
  std::string apply_file;
  std::size_t apply_fuzz = kDefaultMaxFuzz;
  apply->add_option("patch", apply_file)->required();
  apply->add_option("--fuzz", apply_fuzz);

  // merge
  auto* merge = app.add_subcommand("merge", "Merge a branch into HEAD");
  std::string merge_target, merge_strategy, merge_base, merge_message;
  merge->add_option("branch", merge_target)->required();
  merge->add_option("--strategy", merge_strategy, "three-way, recursive or pcdv");
  merge->add_option("--base", merge_base, "Three-way against this revision; single-parent commit");
  merge->add_option("-m,--message", merge_message);
  merge->add_option("--author", author);
  merge->add_option("--date", date);

  // clone / pull / push
  auto* clone = app.add_subcommand("clone", "Copy a repository");
  std::string clone_src, clone_dst;
  clone->add_option("source", clone_src)->required();
  clone->add_option("dest", clone_dst)->required();

  auto* pull = app.add_subcommand("pull", "Fetch a branch and merge it");
  std::string remote_path;
  std::optional<std::string> remote_branch;
  pull->add_option("remote", remote_path)->required();
  pull->add_option("branch", remote_branch);
  pull->add_option("--strategy", merge_strategy);
  pull->add_option("--author", author);
  pull->add_option("--date", date);

  auto* push_cmd = app.add_subcommand("push", "Fast-forward a remote branch");
  push_cmd->add_option("remote", remote_path)->required();
  push_cmd->add_option("branch", remote_branch);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (init->parsed()) {
      RepoConfig cfg;
      auto s = parse_merge_strategy(init_strategy);
      if (!s) throw Error(Errc::InvalidArgument, "unknown merge strategy '" + init_strategy + "'");
      cfg.strategy = *s;
      if (init_storage == "weave") cfg.storage = StorageBackend::Weave;
      else if (init_storage == "revlog") cfg.storage = StorageBackend::Revlog;
      else throw Error(Errc::InvalidArgument, "unknown storage backend '" + init_storage + "'");
      cfg.user = init_user;
      fs::path dir = ctx.path(init_dir);
      fs::create_directories(dir);
      Repository::init(dir, cfg);
      out << "Initialized empty repository in " << (dir / kMetaDir).string() << "\n";
      return 0;
    }

    if (clone->parsed()) {
      Repository r = clone_repository(ctx.path(clone_src), ctx.path(clone_dst));
      out << "Cloned into " << r.root().string() << "\n";
      return 0;
    }

    Repository repo = ctx.repo();
    auto lock_path = repo.meta() / "lock";

    if (commit->parsed()) {
      LockFile lock(lock_path);
      std::vector<std::string> rel;
      for (const auto& p : commit_paths) rel.push_back(repo_relative(ctx, repo, p));
      if (message.empty() || message.back() != '\n') message += '\n';
      ObjectId id = repo.commit(message, resolve_author(author, repo), resolve_date(date), rel);
      Commit c = repo.read_commit(id);
      out << "[" << repo.head_branch().value_or("detached") << " " << id.short_hex() << "] " << c.subject() << "\n";
      return 0;
    }

    if (branch->parsed()) {
      if (branch_name.empty()) {
        auto current = repo.head_branch();
        for (const auto& [name, id] : repo.refs().list())
          out << (current == name ? "* " : "  ") << name << " " << id.short_hex() << "\n";
        return 0;
      }
      LockFile lock(lock_path);
      if (branch_delete) {
        if (repo.head_branch() == branch_name) throw Error(Errc::InvalidArgument, "cannot delete the current branch");
        if (!repo.refs().exists(branch_name)) throw Error(Errc::UnknownRef, branch_name);
        repo.refs().remove(branch_name);
        return 0;
      }
      if (!RefStore::valid_name(branch_name)) throw Error(Errc::InvalidArgument, "invalid branch name");
      if (repo.refs().exists(branch_name)) throw Error(Errc::InvalidArgument, branch_name + " already exists");
      repo.refs().set(branch_name, repo.resolve(branch_start.empty() ? "HEAD" : branch_start));
      return 0;
    }

    if (co->parsed()) {
      LockFile lock(lock_path);
      checkout(repo, co_target, co_force, co_create);
      if (auto b = repo.head_branch()) out << "On branch " << *b << "\n";
      else out << "HEAD detached at " << repo.head_commit()->short_hex() << "\n";
      return 0;
    }

    if (status->parsed()) {
      if (auto b = repo.head_branch()) out << "On branch " << *b << "\n";
      else if (auto h = repo.head_commit()) out << "HEAD detached at " << h->short_hex() << "\n";
      if (auto ms = repo.merge_state()) {
        out << "Merging " << ms->other.short_hex() << "\n";
        for (const auto& p : ms->conflicts) out << "U " << p << "\n";
      }
      for (const auto& e : repo.status()) {
        char tag = e.status == FileStatus::Added      ? 'A'
                   : e.status == FileStatus::Modified ? 'M'
                   : e.status == FileStatus::Deleted  ? 'D'
                                                      : 'T';
        out << tag << " " << e.path << "\n";
      }
      return 0;
    }

    if (log->parsed()) {
      ObjectId start = repo.resolve(log_rev);
      HistoryDag dag = repo.load_dag({start});
      std::vector<ObjectId> heads{start};
      auto order = dag.toposort(heads);
      if (log_graph) {
        std::vector<LogEntry> entries;
        for (const auto& id : order) {
          Commit c = repo.read_commit(id);
          entries.push_back({id, c.parents, c.subject(), c.author});
        }
        for (const auto& line : render_graph(entries)) out << line << "\n";
        return 0;
      }
      for (const auto& id : order) {
        Commit c = repo.read_commit(id);
        out << "commit " << id.hex() << "\n";
        if (c.parents.size() > 1) {
          out << "Merge:";
          for (const auto& p : c.parents) out << " " << p.short_hex();
          out << "\n";
        }
        out << "Author: " << c.author << "\n";
        out << "Date:   " << format_date(c.timestamp) << "\n\n";
        for (const auto& l : split_lines(c.message)) out << "    " << text_with_newline(l);
        out << "\n";
      }
      return 0;
    }

    if (diff->parsed()) {
      std::set<std::string> only;
      for (const auto& p : diff_paths) only.insert(repo_relative(ctx, repo, p));
      auto wanted = [&](const std::string& p) {
        if (only.empty()) return true;
        for (const auto& o : only)
          if (p == o || p.rfind(o + "/", 0) == 0) return true;
        return false;
      };
      if (!diff_cc.empty()) {
        ObjectId id = repo.resolve(diff_cc);
        Commit c = repo.read_commit(id);
        if (c.parents.size() < 2) throw Error(Errc::InvalidArgument, diff_cc + " is not a merge");
        auto merged = snapshot(repo, id);
        std::vector<std::map<std::string, std::string>> parents;
        for (const auto& p : c.parents) parents.push_back(snapshot(repo, p));
        for (const auto& [path, content] : merged) {
          if (!wanted(path)) continue;
          std::vector<Lines> ps;
          for (const auto& pf : parents) {
            auto it = pf.find(path);
            ps.push_back(it == pf.end() ? Lines{} : split_lines(it->second));
          }
          out << emit_combined(ps, split_lines(content), path, diff_context);
        }
        return 0;
      }
      auto algorithm = parse_diff_algorithm(diff_algorithm);
      if (!algorithm) throw Error(Errc::InvalidArgument, "unknown diff algorithm '" + diff_algorithm + "'");
      std::optional<ObjectId> a_rev, b_rev;
      if (diff_revs.empty()) a_rev = repo.head_commit();
      if (!diff_revs.empty()) a_rev = repo.resolve(diff_revs[0]);
      if (diff_revs.size() == 2) b_rev = repo.resolve(diff_revs[1]);
      auto a = a_rev ? snapshot(repo, a_rev) : std::map<std::string, std::string>{};
      auto b = snapshot(repo, b_rev);
      std::set<std::string> paths;
      for (const auto& [p, c] : a) paths.insert(p);
      for (const auto& [p, c] : b) paths.insert(p);
      UnifiedOptions opts;
      opts.algorithm = *algorithm;
      opts.context = diff_context;
      for (const auto& p : paths) {
        if (!wanted(p)) continue;
        auto ia = a.find(p), ib = b.find(p);
        if (ia != a.end() && ib != b.end() && ia->second == ib->second) continue;
        std::string la = ia == a.end() ? "/dev/null" : "a/" + p;
        std::string lb = ib == b.end() ? "/dev/null" : "b/" + p;
        out << "diff --vcs a/" << p << " b/" << p << "\n";
        out << emit_unified(ia == a.end() ? Lines{} : split_lines(ia->second),
                            ib == b.end() ? Lines{} : split_lines(ib->second), la, lb, opts);
      }
      return 0;
    }

    if (annotate->parsed()) {
      ObjectId rev = repo.resolve(ann_rev);
      std::string path = repo_relative(ctx, repo, ann_path);
      Weave w = repo.file_weave(path);
      if (!w.contains(rev.hex())) throw Error(Errc::InvalidArgument, path + " does not exist at " + rev.short_hex());
      std::map<std::string, std::string> authors;
      for (const auto& line : w.annotate(rev.hex())) {
        auto it = authors.find(line.rev);
        if (it == authors.end()) {
          auto id = ObjectId::from_hex(line.rev);
          it = authors.emplace(line.rev, id ? repo.read_commit(*id).author : "?").first;
        }
        out << line.rev.substr(0, 7) << " (" << it->second << ") " << text_with_newline(line.text);
      }
      return 0;
    }

    if (pick->parsed()) {
      ObjectId start = repo.resolve(pick_rev);
      HistoryDag dag = repo.load_dag({start});
      std::vector<ObjectId> heads{start};
      std::vector<PickaxeCommit> commits;
      for (const auto& id : dag.toposort(heads)) commits.push_back({id, dag.parents(id)});
      FilesOf files_of = [&](const ObjectId& id) { return snapshot(repo, id); };
      for (const auto& hit : pickaxe(commits, files_of, pick_needle)) {
        out << hit.commit.short_hex() << " " << (hit.change == PickaxeChange::Added ? '+' : '-') << " " << hit.path
            << " (" << hit.before << " -> " << hit.after << ")\n";
      }
      return 0;
    }

    if (gc->parsed()) {
      LockFile lock(lock_path);
      GcReport r = repo.gc(gc_prune);
      out << "packed " << r.packed << " objects, removed " << r.loose_removed << " loose, pruned " << r.pruned
          << "\n";
      return 0;
    }

    if (cat->parsed()) {
      ObjectId id;
      try {
        id = repo.resolve(cat_id);
      } catch (const Error&) {
        id = repo.objects().resolve_prefix(cat_id);
      }
      auto obj = repo.objects().get(id);
      if (cat_type) {
        out << kind_name(obj.kind) << "\n";
      } else if (cat_size) {
        out << obj.payload.size() << "\n";
      } else if (obj.kind == ObjectKind::Tree) {
        for (const auto& e : parse_tree(obj.payload).entries)
          out << (e.kind == ObjectKind::Tree ? "040000" : e.mode == FileMode::Executable ? "100755" : "100644") << " "
              << kind_name(e.kind) << " " << e.id.hex() << "\t" << e.name << "\n";
      } else {
        out << obj.payload;
      }
      (void)cat_pretty;
      return 0;
    }

    if (apply->parsed()) {
      LockFile lock(lock_path);
      UnifiedPatch patch = parse_unified(read_file(ctx.path(apply_file)));
      std::map<std::string, std::string> files;
      std::set<std::string> touched;
      for (const auto& fp : patch.files) {
        std::string from = patch_path(fp.old_path);
        if (from.empty()) continue;
        touched.insert(from);
        if (fs::exists(repo.root() / from)) files[from] = read_file(repo.root() / from);
      }
      ApplyResult result = apply_unified(patch, files, apply_fuzz);
      for (const auto& p : touched)
        if (!result.files.count(p)) fs::remove(repo.root() / p);
      for (const auto& [p, content] : result.files) {
        auto mode = FileMode::Normal;
        if (fs::exists(repo.root() / p) &&
            (fs::status(repo.root() / p).permissions() & fs::perms::owner_exec) != fs::perms::none)
          mode = FileMode::Executable;
        repo.write_worktree_file(p, content, mode);
      }
      for (const auto& h : result.hunks)
        if (h.offset != 0 || h.fuzz != 0)
          out << h.path << ": hunk " << h.hunk + 1 << " applied at offset " << h.offset << " with fuzz " << h.fuzz
              << "\n";
      return 0;
    }

    std::optional<MergeStrategy> strategy;
    if (!merge_strategy.empty()) {
      strategy = parse_merge_strategy(merge_strategy);
      if (!strategy) throw Error(Errc::InvalidArgument, "unknown merge strategy '" + merge_strategy + "'");
    }
    MergeRequest req;
    req.strategy = strategy;
    req.author = resolve_author(author, repo);
    req.timestamp = resolve_date(date);
    MergeStrategy used = strategy.value_or(repo.config().strategy);

    if (merge->parsed()) {
      LockFile lock(lock_path);
      if (!merge_base.empty()) {
        req.base = merge_base;
        used = MergeStrategy::ThreeWay;
      }
      if (!merge_message.empty()) req.message = text_with_newline(merge_message);
      MergeReport r = merge_into_head(repo, merge_target, req);
      print_merge_report(ctx, r, used);
      return r.outcome == MergeOutcome::Conflicted ? 1 : 0;
    }

    if (pull->parsed()) {
      LockFile lock(lock_path);
      PullReport r = vcs::pull(repo, ctx.path(remote_path), remote_branch, req);
      out << "fetched " << r.transfer.objects << " objects\n";
      print_merge_report(ctx, r.merge, used);
      return r.merge.outcome == MergeOutcome::Conflicted ? 1 : 0;
    }

    if (push_cmd->parsed()) {
      TransferReport r = push(repo, ctx.path(remote_path), remote_branch);
      out << "pushed " << r.objects << " objects, now at " << r.head.short_hex() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace vcs
