#include "vcs/repository.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"
#include "vcs/revlog.hpp"

namespace vcs {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string_view storage_name(StorageBackend s) { return s == StorageBackend::Weave ? "weave" : "revlog"; }

}  // namespace

std::string RepoConfig::serialize() const {
  std::string out = "hash = " + hash + "\n";
  out += "merge.strategy = " + std::string(merge_strategy_name(strategy)) + "\n";
  out += "storage = " + std::string(storage_name(storage)) + "\n";
  if (!user.empty()) out += "user = " + user + "\n";
  return out;
}

RepoConfig RepoConfig::parse(std::string_view text) {
  RepoConfig cfg;
  for (const auto& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "config line without '=': " + line);
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "hash") {
      if (value != "sha1") throw Error(Errc::InvalidArgument, "unsupported hash '" + value + "'");
      cfg.hash = value;
    } else if (key == "merge.strategy") {
      auto s = parse_merge_strategy(value);
      if (!s) throw Error(Errc::InvalidArgument, "unknown merge strategy '" + value + "'");
      cfg.strategy = *s;
    } else if (key == "storage") {
      if (value == "weave") cfg.storage = StorageBackend::Weave;
      else if (value == "revlog") cfg.storage = StorageBackend::Revlog;
      else throw Error(Errc::InvalidArgument, "unknown storage backend '" + value + "'");
    } else if (key == "user") {
      cfg.user = value;
    }
  }
  return cfg;
}

Repository::Repository(fs::path root, RepoConfig config)
    : root_(std::move(root)),
      config_(std::move(config)),
      objects_(std::make_unique<ObjectStore>(root_ / kMetaDir / "objects", root_ / kMetaDir / "packs")),
      refs_(root_ / kMetaDir / "refs") {}

Repository Repository::init(const fs::path& root, const RepoConfig& config) {
  fs::path meta = root / kMetaDir;
  if (fs::exists(meta)) throw Error(Errc::InvalidArgument, root.string() + " is already a repository");
  for (const char* dir : {"refs", "objects", "packs", "weaves", "revlogs"}) fs::create_directories(meta / dir);
  write_file_atomic(meta / "config", config.serialize());
  write_file_atomic(meta / "HEAD", "ref: main\n");
  return Repository(fs::absolute(root).lexically_normal(), config);
}

Repository Repository::open(const fs::path& root) {
  fs::path meta = root / kMetaDir;
  if (!fs::is_directory(meta) || !fs::exists(meta / "HEAD"))
    throw Error(Errc::NotARepository, root.string());
  RepoConfig cfg = RepoConfig::parse(fs::exists(meta / "config") ? read_file(meta / "config") : "");
  return Repository(fs::absolute(root).lexically_normal(), cfg);
}

Repository Repository::discover(const fs::path& start) {
  fs::path cur = fs::absolute(start).lexically_normal();
  while (true) {
    if (fs::is_directory(cur / kMetaDir)) return open(cur);
    if (!cur.has_parent_path() || cur.parent_path() == cur) break;
    cur = cur.parent_path();
  }
  throw Error(Errc::NotARepository, start.string());
}

std::optional<std::string> Repository::head_branch() const {
  std::string head = read_file(meta() / "HEAD");
  if (head.rfind("ref: ", 0) != 0) return std::nullopt;
  return trim(std::string_view(head).substr(5));
}

std::optional<ObjectId> Repository::head_commit() const {
  std::string head = read_file(meta() / "HEAD");
  if (head.rfind("ref: ", 0) == 0) return refs_.get(trim(std::string_view(head).substr(5)));
  auto id = ObjectId::from_hex(trim(head));
  if (!id) throw Error(Errc::CorruptObject, "HEAD is malformed");
  return id;
}

void Repository::set_head_branch(const std::string& branch) {
  if (!RefStore::valid_name(branch)) throw Error(Errc::InvalidArgument, "invalid branch name '" + branch + "'");
  write_file_atomic(meta() / "HEAD", "ref: " + branch + "\n");
}

void Repository::set_head_detached(const ObjectId& id) { write_file_atomic(meta() / "HEAD", id.hex() + "\n"); }

ObjectId Repository::resolve(std::string_view rev) const {
  if (rev == "HEAD") {
    auto h = head_commit();
    if (!h) throw Error(Errc::UnknownRef, "HEAD has no commits yet");
    return *h;
  }
  if (RefStore::valid_name(rev))
    if (auto id = refs_.get(rev)) return *id;
  if (rev.size() >= 4 && is_hex(rev)) {
    try {
      ObjectId id = objects_->resolve_prefix(rev);
      if (objects_->get(id).kind == ObjectKind::Commit) return id;
    } catch (const Error& e) {
      if (e.code() == Errc::Ambiguous) throw;
    }
  }
  throw Error(Errc::UnknownRef, std::string(rev));
}

Commit Repository::read_commit(const ObjectId& id) const {
  auto obj = objects_->get(id);
  if (obj.kind != ObjectKind::Commit) throw Error(Errc::UnknownRef, id.hex() + " is not a commit");
  return parse_commit(obj.payload);
}

std::string Repository::read_blob(const ObjectId& id) const {
  auto obj = objects_->get(id);
  if (obj.kind != ObjectKind::Blob) throw Error(Errc::CorruptObject, id.hex() + " is not a blob");
  return obj.payload;
}

FlatTree Repository::read_flat_tree(const ObjectId& tree_id) const {
  FlatTree out;
  std::function<void(const ObjectId&, const std::string&)> walk = [&](const ObjectId& id, const std::string& prefix) {
    auto obj = objects_->get(id);
    if (obj.kind != ObjectKind::Tree) throw Error(Errc::CorruptObject, id.hex() + " is not a tree");
    for (const auto& e : parse_tree(obj.payload).entries) {
      std::string path = prefix.empty() ? e.name : prefix + "/" + e.name;
      if (e.kind == ObjectKind::Tree) walk(e.id, path);
      else out[path] = {e.id, e.mode};
    }
  };
  walk(tree_id, "");
  return out;
}

FlatTree Repository::commit_files(const ObjectId& commit_id) const { return read_flat_tree(read_commit(commit_id).tree); }

ObjectId Repository::write_flat_tree(const FlatTree& files) {
  // directory path -> entries; written deepest first
  std::map<std::string, std::vector<TreeEntry>> dirs;
  dirs[""];
  for (const auto& [path, f] : files) {
    auto slash = path.rfind('/');
    std::string dir = slash == std::string::npos ? "" : path.substr(0, slash);
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    dirs[dir].push_back({name, f.mode, f.blob, ObjectKind::Blob});
    while (!dir.empty()) {
      auto s = dir.rfind('/');
      dir = s == std::string::npos ? "" : dir.substr(0, s);
      dirs[dir];
    }
  }
  std::vector<std::string> order;
  for (const auto& [dir, entries] : dirs) order.push_back(dir);
  std::sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
    auto depth = [](const std::string& s) { return s.empty() ? 0 : std::count(s.begin(), s.end(), '/') + 1; };
    return depth(a) != depth(b) ? depth(a) > depth(b) : a < b;
  });
  ObjectId root_id;
  for (const auto& dir : order) {
    ObjectId id = objects_->put(ObjectKind::Tree, serialize_tree(make_tree(dirs[dir])));
    if (dir.empty()) {
      root_id = id;
      continue;
    }
    auto s = dir.rfind('/');
    std::string parent = s == std::string::npos ? "" : dir.substr(0, s);
    std::string name = s == std::string::npos ? dir : dir.substr(s + 1);
    dirs[parent].push_back({name, FileMode::Normal, id, ObjectKind::Tree});
  }
  return root_id;
}

FlatTree Repository::scan_worktree(bool store) {
  FlatTree out;
  for (auto it = fs::recursive_directory_iterator(root_); it != fs::recursive_directory_iterator(); ++it) {
    const auto& entry = *it;
    if (entry.is_directory() && entry.path().filename() == kMetaDir) {
      it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file()) continue;
    std::string path = fs::relative(entry.path(), root_).generic_string();
    std::string content = read_file(entry.path());
    auto perms = entry.status().permissions();
    FileMode mode = (perms & fs::perms::owner_exec) != fs::perms::none ? FileMode::Executable : FileMode::Normal;
    ObjectId id = store ? objects_->put(ObjectKind::Blob, content) : hash_object(ObjectKind::Blob, content);
    out[path] = {id, mode};
  }
  return out;
}

std::vector<StatusEntry> Repository::status() {
  FlatTree work = scan_worktree(false);
  FlatTree head;
  if (auto h = head_commit()) head = commit_files(*h);
  std::vector<StatusEntry> out;
  for (const auto& [path, f] : work) {
    auto it = head.find(path);
    if (it == head.end()) out.push_back({path, FileStatus::Added});
    else if (it->second.blob != f.blob) out.push_back({path, FileStatus::Modified});
    else if (it->second.mode != f.mode) out.push_back({path, FileStatus::ModeChanged});
  }
  for (const auto& [path, f] : head)
    if (!work.count(path)) out.push_back({path, FileStatus::Deleted});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return out;
}

bool Repository::dirty() { return !status().empty(); }

void Repository::write_worktree_file(const std::string& path, std::string_view content, FileMode mode) {
  fs::path p = root_ / path;
  fs::create_directories(p.parent_path());
  write_file_atomic(p, content);
  auto exec = fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec;
  fs::permissions(p, exec, mode == FileMode::Executable ? fs::perm_options::add : fs::perm_options::remove);
}

void Repository::write_worktree(const FlatTree& current, const FlatTree& target) {
  for (const auto& [path, f] : current) {
    if (target.count(path)) continue;
    fs::path p = root_ / path;
    fs::remove(p);
    for (fs::path dir = p.parent_path(); dir != root_ && fs::is_directory(dir) && fs::is_empty(dir);
         dir = dir.parent_path())
      fs::remove(dir);
  }
  for (const auto& [path, f] : target) {
    auto it = current.find(path);
    if (it != current.end() && it->second == f && fs::exists(root_ / path)) continue;
    write_worktree_file(path, read_blob(f.blob), f.mode);
  }
}

namespace {

bool has_conflict_markers(const std::string& content) {
  for (const auto& line : split_lines(content))
    if (line.rfind("<<<<<<< ", 0) == 0 || line.rfind(">>>>>>> ", 0) == 0) return true;
  return false;
}

bool under(const std::string& path, const std::string& prefix) {
  return path == prefix || (path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0 &&
                            path[prefix.size()] == '/');
}

}  // namespace

ObjectId Repository::commit(const std::string& message, const std::string& author, std::int64_t timestamp,
                            const std::vector<std::string>& paths) {
  auto state = merge_state();
  if (state) {
    for (const auto& path : state->conflicts) {
      fs::path p = root_ / path;
      if (fs::exists(p) && has_conflict_markers(read_file(p)))
        throw Error(Errc::ConflictsPending, path + " still contains conflict markers");
    }
  }
  FlatTree work = scan_worktree(true);
  auto head = head_commit();
  FlatTree files = work;
  if (!paths.empty()) {
    if (state) throw Error(Errc::ConflictsPending, "a merge commit takes the whole tree");
    files = head ? commit_files(*head) : FlatTree{};
    for (const auto& raw : paths) {
      std::string prefix = fs::path(raw).lexically_normal().generic_string();
      while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
      bool matched = false;
      for (auto it = files.begin(); it != files.end();) {
        if (under(it->first, prefix)) {
          matched = true;
          it = files.erase(it);
        } else {
          ++it;
        }
      }
      for (const auto& [path, f] : work)
        if (under(path, prefix)) {
          files[path] = f;
          matched = true;
        }
      if (!matched) throw Error(Errc::InvalidArgument, "pathspec '" + raw + "' matches nothing");
    }
  }
  ObjectId tree = write_flat_tree(files);
  std::vector<ObjectId> parents;
  if (head) parents.push_back(*head);
  if (state) parents.push_back(state->other);
  if (!state && head && read_commit(*head).tree == tree) throw Error(Errc::InvalidArgument, "nothing to commit");
  ObjectId id = commit_tree(tree, parents, author, timestamp, message);
  clear_merge_state();
  return id;
}

ObjectId Repository::commit_tree(const ObjectId& tree, std::vector<ObjectId> parents, const std::string& author,
                                 std::int64_t timestamp, const std::string& message) {
  Commit c;
  c.tree = tree;
  c.parents = std::move(parents);
  c.author = author;
  c.timestamp = timestamp;
  c.message = message;
  ObjectId id = objects_->put(ObjectKind::Commit, serialize_commit(c));
  if (auto branch = head_branch()) refs_.set(*branch, id);
  else set_head_detached(id);
  record_history(id);
  return id;
}

std::vector<ObjectId> Repository::all_heads() const {
  std::set<ObjectId> heads;
  for (const auto& [name, id] : refs_.list()) heads.insert(id);
  if (auto h = head_commit()) heads.insert(*h);
  if (auto s = merge_state()) heads.insert(s->other);
  return {heads.begin(), heads.end()};
}

HistoryDag Repository::load_dag(const std::vector<ObjectId>& extra) const {
  HistoryDag dag;
  std::unordered_map<ObjectId, Commit> commits;
  std::vector<ObjectId> heads = all_heads();
  heads.insert(heads.end(), extra.begin(), extra.end());
  std::vector<ObjectId> stack = heads;
  while (!stack.empty()) {
    ObjectId id = stack.back();
    stack.pop_back();
    if (commits.count(id)) continue;
    Commit c = read_commit(id);
    for (const auto& p : c.parents)
      if (!commits.count(p)) stack.push_back(p);
    commits.emplace(id, std::move(c));
  }
  // parents must be added first
  std::vector<std::pair<ObjectId, bool>> work;
  for (const auto& h : heads) work.push_back({h, false});
  while (!work.empty()) {
    auto [id, expanded] = work.back();
    work.pop_back();
    if (dag.contains(id)) continue;
    const Commit& c = commits.at(id);
    if (expanded) {
      dag.add_commit(id, c.parents, c.timestamp);
      continue;
    }
    work.push_back({id, true});
    for (const auto& p : c.parents)
      if (!dag.contains(p)) work.push_back({p, false});
  }
  return dag;
}

std::optional<Repository::MergeState> Repository::merge_state() const {
  fs::path p = meta() / "MERGE_STATE";
  if (!fs::exists(p)) return std::nullopt;
  Lines lines = split_lines(read_file(p));
  if (lines.empty()) throw Error(Errc::CorruptObject, "MERGE_STATE is empty");
  auto other = ObjectId::from_hex(line_body(lines[0]));
  if (!other) throw Error(Errc::CorruptObject, "MERGE_STATE is malformed");
  MergeState state{*other, {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view l = line_body(lines[i]);
    if (l.rfind("conflict ", 0) == 0) state.conflicts.emplace_back(l.substr(9));
  }
  return state;
}

void Repository::write_merge_state(const MergeState& state) {
  std::string text = state.other.hex() + "\n";
  for (const auto& c : state.conflicts) text += "conflict " + c + "\n";
  write_file_atomic(meta() / "MERGE_STATE", text);
}

void Repository::clear_merge_state() {
  std::error_code ec;
  fs::remove(meta() / "MERGE_STATE", ec);
}

std::string Repository::encode_store_name(std::string_view path) {
  std::string out;
  for (char c : path) {
    if (c == '%') out += "%25";
    else if (c == '/') out += "%2F";
    else out += c;
  }
  if (!out.empty() && out[0] == '.') out = "%2E" + out.substr(1);
  return out;
}

void Repository::record_history(const ObjectId& commit_id) {
  Commit c = read_commit(commit_id);
  FlatTree files = read_flat_tree(c.tree);
  std::vector<FlatTree> parent_files;
  for (const auto& p : c.parents) parent_files.push_back(commit_files(p));

  for (const auto& [path, f] : files) {
    std::string name = encode_store_name(path);
    if (config_.storage == StorageBackend::Weave) {
      fs::path wp = meta() / "weaves" / (name + ".weave");
      Weave w = fs::exists(wp) ? load_weave(wp) : Weave{};
      if (w.contains(commit_id.hex())) continue;
      std::vector<std::string> parents;
      for (const auto& p : c.parents)
        if (w.contains(p.hex())) parents.push_back(p.hex());
      w.add(commit_id.hex(), std::span<const std::string>(parents), split_lines(read_blob(f.blob)));
      save_weave(wp, w);
    } else {
      ObjectId p1, p2;
      for (std::size_t i = 0; i < parent_files.size() && i < 2; ++i) {
        auto it = parent_files[i].find(path);
        if (it != parent_files[i].end()) (i == 0 ? p1 : p2) = it->second.blob;
      }
      fs::create_directories(meta() / "revlogs");
      Revlog log(meta() / "revlogs", name);
      if (!log.find(f.blob)) log.append(read_blob(f.blob), p1, p2);
    }
  }
}

void Repository::record_history_from(const std::vector<ObjectId>& heads) {
  HistoryDag dag = load_dag(heads);
  std::vector<ObjectId> order = dag.toposort(heads);
  std::reverse(order.begin(), order.end());
  for (const auto& id : order) record_history(id);
}

Weave Repository::file_weave(const std::string& path) const {
  if (config_.storage == StorageBackend::Weave) {
    fs::path wp = meta() / "weaves" / (encode_store_name(path) + ".weave");
    return fs::exists(wp) ? load_weave(wp) : Weave{};
  }
  // built on demand from the commit history
  HistoryDag dag = load_dag();
  auto heads = all_heads();
  std::vector<ObjectId> order = dag.toposort(heads);
  std::reverse(order.begin(), order.end());
  Weave w;
  for (const auto& id : order) {
    FlatTree files = commit_files(id);
    auto it = files.find(path);
    if (it == files.end()) continue;
    std::vector<std::string> parents;
    for (const auto& p : dag.parents(id))
      if (w.contains(p.hex())) parents.push_back(p.hex());
    w.add(id.hex(), std::span<const std::string>(parents), split_lines(read_blob(it->second.blob)));
  }
  return w;
}

std::optional<std::string> Repository::history_content(const std::string& path, const ObjectId& commit) const {
  if (config_.storage == StorageBackend::Weave) {
    Weave w = file_weave(path);
    if (!w.contains(commit.hex())) return std::nullopt;
    return join_lines(w.extract(commit.hex()));
  }
  FlatTree files = commit_files(commit);
  auto it = files.find(path);
  if (it == files.end()) return std::nullopt;
  Revlog log(meta() / "revlogs", encode_store_name(path));
  auto seq = log.find(it->second.blob);
  if (!seq) return std::nullopt;
  return log.read(*seq);
}

GcReport Repository::gc(bool prune) {
  GcReport report;
  auto heads = all_heads();
  auto fetch = [this](const ObjectId& id) { return objects_->try_get(id); };
  std::vector<PackObject> objs = collect_reachable(heads, fetch);
  std::unordered_set<ObjectId> reachable;
  for (const auto& o : objs) reachable.insert(o.id);
  auto everything = objects_->all_ids();
  if (!prune)
    for (const auto& id : everything)
      if (!reachable.count(id)) {
        auto obj = objects_->get(id);
        objs.push_back({id, obj.kind, std::move(obj.payload), ""});
      }

  std::vector<fs::path> old_packs;
  if (fs::is_directory(objects_->packs_dir()))
    for (const auto& e : fs::directory_iterator(objects_->packs_dir())) old_packs.push_back(e.path());

  fs::path new_pack;
  if (!objs.empty()) {
    fs::create_directories(objects_->packs_dir());
    new_pack = write_pack(objects_->packs_dir(), build_pack(objs));
  }
  fs::path new_index = new_pack;
  new_index.replace_extension(".idx");
  for (const auto& p : old_packs)
    if (p != new_pack && p != new_index) fs::remove(p);
  for (const auto& id : objects_->loose().list()) {
    objects_->loose().remove(id);
    if (reachable.count(id) || !prune) ++report.loose_removed;
    else ++report.pruned;
  }
  report.packed = objs.size();
  objects_->reload_packs();
  return report;
}

}  // namespace vcs
