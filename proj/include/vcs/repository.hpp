#pragma once

// On-disk repository: object store, refs, working tree and per-file history
// stores.
//
//   <root>/.vcs/config        "key = value" lines
//   <root>/.vcs/HEAD          "ref: <branch>\n" or "<hex>\n" (detached)
//   <root>/.vcs/refs/         branch pointers (RefStore)
//   <root>/.vcs/objects/      loose objects
//   <root>/.vcs/packs/        pack-<sha>.pack / .idx
//   <root>/.vcs/weaves/       one weave per tracked path (storage = weave)
//   <root>/.vcs/revlogs/      one revlog per tracked path (storage = revlog)
//   <root>/.vcs/MERGE_STATE   pending merge: "<hex>\n" then "conflict <path>\n"*
//   <root>/.vcs/lock          writer lock
//
// There is no staging area: a commit snapshots the working tree.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/histdag.hpp"
#include "vcs/loose_store.hpp"
#include "vcs/merge.hpp"
#include "vcs/object.hpp"
#include "vcs/pack.hpp"
#include "vcs/weave.hpp"

namespace vcs {

inline constexpr const char* kMetaDir = ".vcs";

enum class StorageBackend : std::uint8_t { Weave, Revlog };

struct RepoConfig {
  std::string hash = "sha1";
  MergeStrategy strategy = MergeStrategy::Recursive;
  StorageBackend storage = StorageBackend::Weave;
  std::string user;

  std::string serialize() const;
  // Unknown keys are kept out; bad values throw InvalidArgument.
  static RepoConfig parse(std::string_view text);
};

// Loose objects first, then packs.
class ObjectStore {
 public:
  ObjectStore(std::filesystem::path objects_dir, std::filesystem::path packs_dir);

  ObjectId put(ObjectKind kind, std::string_view payload);
  // Throws UnknownObject; CorruptObject/CorruptPack on damaged storage.
  StoredObject get(const ObjectId& id) const;
  std::optional<StoredObject> try_get(const ObjectId& id) const;
  bool contains(const ObjectId& id) const;
  std::vector<ObjectId> all_ids() const;
  ObjectId resolve_prefix(std::string_view hex_prefix) const;

  LooseStore& loose() { return loose_; }
  const std::filesystem::path& packs_dir() const { return packs_dir_; }
  std::size_t pack_count() const { return packs_.size(); }
  void reload_packs();

 private:
  LooseStore loose_;
  std::filesystem::path packs_dir_;
  std::vector<std::shared_ptr<PackReader>> packs_;
};

struct FileEntry {
  ObjectId blob;
  FileMode mode = FileMode::Normal;
  bool operator==(const FileEntry&) const = default;
};

// Slash-separated path -> file, for a whole tree.
using FlatTree = std::map<std::string, FileEntry>;

enum class FileStatus : std::uint8_t { Added, Modified, Deleted, ModeChanged };

struct StatusEntry {
  std::string path;
  FileStatus status;
  bool operator==(const StatusEntry&) const = default;
};

struct GcReport {
  std::size_t packed = 0;
  std::size_t loose_removed = 0;
  std::size_t pruned = 0;
};

class Repository {
 public:
  // Throws InvalidArgument when `root` already holds a repository.
  static Repository init(const std::filesystem::path& root, const RepoConfig& config = {});
  // Throws NotARepository.
  static Repository open(const std::filesystem::path& root);
  // Searches `start` and its parents.
  static Repository discover(const std::filesystem::path& start);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path meta() const { return root_ / kMetaDir; }
  const RepoConfig& config() const { return config_; }
  ObjectStore& objects() { return *objects_; }
  const ObjectStore& objects() const { return *objects_; }
  RefStore& refs() { return refs_; }
  const RefStore& refs() const { return refs_; }

  // HEAD
  std::optional<std::string> head_branch() const;
  std::optional<ObjectId> head_commit() const;
  void set_head_branch(const std::string& branch);
  void set_head_detached(const ObjectId& id);
  // "HEAD", a branch or other ref name, or a hex prefix of a commit.
  // Throws UnknownRef.
  ObjectId resolve(std::string_view rev) const;

  Commit read_commit(const ObjectId& id) const;
  std::string read_blob(const ObjectId& id) const;
  FlatTree read_flat_tree(const ObjectId& tree_id) const;
  FlatTree commit_files(const ObjectId& commit_id) const;
  ObjectId write_flat_tree(const FlatTree& files);

  // Working tree (everything under root except .vcs).
  // With store = true the blobs are written to the object store.
  FlatTree scan_worktree(bool store = false);
  std::vector<StatusEntry> status();
  bool dirty();
  // Makes the working tree match `target`, given that it currently matches `current`.
  void write_worktree(const FlatTree& current, const FlatTree& target);
  void write_worktree_file(const std::string& path, std::string_view content, FileMode mode);

  // Snapshots the working tree; with `paths`, only those paths are taken from
  // the working tree and the rest from HEAD. A pending merge adds its second
  // parent and is cleared (ConflictsPending while marker lines remain).
  ObjectId commit(const std::string& message, const std::string& author, std::int64_t timestamp,
                  const std::vector<std::string>& paths = {});
  // Low-level: store a commit object, advance HEAD, record file histories.
  ObjectId commit_tree(const ObjectId& tree, std::vector<ObjectId> parents, const std::string& author,
                       std::int64_t timestamp, const std::string& message);

  // All commits reachable from refs, HEAD, a pending merge and `extra`.
  HistoryDag load_dag(const std::vector<ObjectId>& extra = {}) const;
  std::vector<ObjectId> all_heads() const;

  // Pending merge state.
  struct MergeState {
    ObjectId other;
    std::vector<std::string> conflicts;
  };
  std::optional<MergeState> merge_state() const;
  void write_merge_state(const MergeState& state);
  void clear_merge_state();

  // Per-file history stores, keyed by commit.
  void record_history(const ObjectId& commit_id);
  // Records every commit reachable from `heads`, parents first.
  void record_history_from(const std::vector<ObjectId>& heads);
  // The stored weave (weave backend) or one built from history.
  Weave file_weave(const std::string& path) const;
  // Content of `path` at `commit` read back from the history store.
  std::optional<std::string> history_content(const std::string& path, const ObjectId& commit) const;
  static std::string encode_store_name(std::string_view path);

  GcReport gc(bool prune);

 private:
  Repository(std::filesystem::path root, RepoConfig config);

  std::filesystem::path root_;
  RepoConfig config_;
  std::unique_ptr<ObjectStore> objects_;
  RefStore refs_;
};

// Copies every object reachable from `heads` that `to` lacks, then checks
// that the closure is complete at `to` (DanglingReference otherwise).
// Returns the number of objects copied.
std::size_t transfer_objects(const ObjectStore& from, ObjectStore& to, const std::vector<ObjectId>& heads);
// Throws DanglingReference when something reachable from `heads` is missing.
void audit_closure(const ObjectStore& store, const std::vector<ObjectId>& heads);

}  // namespace vcs
