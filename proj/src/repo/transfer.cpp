#include "vcs/bytes.hpp"
#include "vcs/error.hpp"
#include "vcs/operations.hpp"

namespace vcs {

namespace fs = std::filesystem;

namespace {

Repository open_remote(const fs::path& path) {
  try {
    return Repository::open(path);
  } catch (const Error& e) {
    if (e.code() != Errc::NotARepository) throw;
    throw Error(Errc::UnknownRemote, path.string() + " is not a repository");
  }
}

std::string pick_branch(const Repository& repo, const std::optional<std::string>& branch) {
  if (branch) return *branch;
  auto b = repo.head_branch();
  if (!b) throw Error(Errc::InvalidArgument, "HEAD is detached; name a branch");
  return *b;
}

bool is_remote_ref(const std::string& name) { return name.rfind("remote/", 0) == 0; }

}  // namespace

Repository clone_repository(const fs::path& source, const fs::path& dest) {
  Repository src = open_remote(source);
  if (fs::exists(dest) && !fs::is_empty(dest)) throw Error(Errc::InvalidArgument, dest.string() + " is not empty");
  fs::create_directories(dest);
  Repository dst = Repository::init(dest, src.config());

  std::map<std::string, ObjectId> branches;
  for (const auto& [name, id] : src.refs().list())
    if (!is_remote_ref(name)) branches[name] = id;
  std::vector<ObjectId> heads;
  for (const auto& [name, id] : branches) heads.push_back(id);
  transfer_objects(src.objects(), dst.objects(), heads);
  for (const auto& [name, id] : branches) {
    dst.refs().set(name, id);
    dst.refs().set("remote/" + name, id);
  }

  if (auto b = src.head_branch()) dst.set_head_branch(*b);
  else if (auto h = src.head_commit()) dst.set_head_detached(*h);
  dst.record_history_from(heads);
  if (auto h = dst.head_commit()) dst.write_worktree({}, dst.commit_files(*h));
  return dst;
}

PullReport pull(Repository& repo, const fs::path& remote, const std::optional<std::string>& branch,
                const MergeRequest& request) {
  Repository src = open_remote(remote);
  std::string name = pick_branch(repo, branch);
  auto tip = src.refs().get(name);
  if (!tip) throw Error(Errc::UnknownRef, name + " at " + remote.string());

  PullReport report;
  report.transfer.objects = transfer_objects(src.objects(), repo.objects(), {*tip});
  report.transfer.head = *tip;
  repo.refs().set("remote/" + name, *tip);
  repo.record_history_from({*tip});
  report.merge = merge_into_head(repo, "remote/" + name, request);
  return report;
}

TransferReport push(Repository& repo, const fs::path& remote, const std::optional<std::string>& branch) {
  Repository dst = open_remote(remote);
  std::string name = pick_branch(repo, branch);
  auto tip = repo.refs().get(name);
  if (!tip) throw Error(Errc::UnknownRef, name);

  LockFile lock(dst.meta() / "lock");
  auto old = dst.refs().get(name);
  if (old && *old != *tip) {
    bool ff = repo.objects().contains(*old) && repo.load_dag({*old}).is_ancestor(*old, *tip);
    if (!ff) throw Error(Errc::NonFastForwardPush, name + " has diverged at the remote; pull and merge first");
  }

  // a working tree that matches the remote's checked-out branch moves along
  bool follow = dst.head_branch() == name && !dst.merge_state() && !dst.dirty();

  TransferReport report;
  report.objects = transfer_objects(repo.objects(), dst.objects(), {*tip});
  report.head = *tip;
  dst.refs().set(name, *tip);
  dst.record_history_from({*tip});
  if (follow) dst.write_worktree(old ? dst.commit_files(*old) : FlatTree{}, dst.commit_files(*tip));
  return report;
}

}  // namespace vcs
