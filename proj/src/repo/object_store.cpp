#include <algorithm>
#include <deque>
#include <unordered_set>

#include "vcs/error.hpp"
#include "vcs/repository.hpp"

namespace vcs {

namespace fs = std::filesystem;

ObjectStore::ObjectStore(fs::path objects_dir, fs::path packs_dir)
    : loose_(std::move(objects_dir)), packs_dir_(std::move(packs_dir)) {
  reload_packs();
}

void ObjectStore::reload_packs() {
  packs_.clear();
  if (!fs::is_directory(packs_dir_)) return;
  std::vector<fs::path> found;
  for (const auto& entry : fs::directory_iterator(packs_dir_))
    if (entry.path().extension() == ".pack") found.push_back(entry.path());
  std::sort(found.begin(), found.end());
  for (const auto& pack : found) {
    fs::path idx = pack;
    idx.replace_extension(".idx");
    if (!fs::exists(idx)) continue;  // a pack is only visible once its index is
    packs_.push_back(std::make_shared<PackReader>(PackReader::open(pack, idx)));
  }
}

ObjectId ObjectStore::put(ObjectKind kind, std::string_view payload) {
  ObjectId id = hash_object(kind, payload);
  if (contains(id)) return id;
  return loose_.put(kind, payload);
}

std::optional<StoredObject> ObjectStore::try_get(const ObjectId& id) const {
  if (auto obj = loose_.try_get(id)) return obj;
  for (const auto& p : packs_)
    if (p->contains(id)) return p->read(id);
  return std::nullopt;
}

StoredObject ObjectStore::get(const ObjectId& id) const {
  auto obj = try_get(id);
  if (!obj) throw Error(Errc::UnknownObject, id.hex());
  return *obj;
}

bool ObjectStore::contains(const ObjectId& id) const {
  if (loose_.contains(id)) return true;
  return std::any_of(packs_.begin(), packs_.end(), [&](const auto& p) { return p->contains(id); });
}

std::vector<ObjectId> ObjectStore::all_ids() const {
  std::vector<ObjectId> ids = loose_.list();
  for (const auto& p : packs_) {
    auto more = p->ids();
    ids.insert(ids.end(), more.begin(), more.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

ObjectId ObjectStore::resolve_prefix(std::string_view hex_prefix) const {
  auto ids = all_ids();
  return vcs::resolve_prefix(ids, hex_prefix);
}

namespace {

std::vector<ObjectId> children_of(const StoredObject& obj) {
  std::vector<ObjectId> out;
  if (obj.kind == ObjectKind::Commit) {
    Commit c = parse_commit(obj.payload);
    out.push_back(c.tree);
    out.insert(out.end(), c.parents.begin(), c.parents.end());
  } else if (obj.kind == ObjectKind::Tree) {
    for (const auto& e : parse_tree(obj.payload).entries) out.push_back(e.id);
  }
  return out;
}

}  // namespace

void audit_closure(const ObjectStore& store, const std::vector<ObjectId>& heads) {
  std::unordered_set<ObjectId> seen;
  std::deque<ObjectId> queue;
  for (const auto& h : heads)
    if (seen.insert(h).second) queue.push_back(h);
  while (!queue.empty()) {
    ObjectId id = queue.front();
    queue.pop_front();
    auto obj = store.try_get(id);
    if (!obj) throw Error(Errc::DanglingReference, id.hex() + " is missing");
    for (const auto& c : children_of(*obj))
      if (seen.insert(c).second) queue.push_back(c);
  }
}

std::size_t transfer_objects(const ObjectStore& from, ObjectStore& to, const std::vector<ObjectId>& heads) {
  // Depth-first post-order over objects the destination lacks, so every
  // object is written after everything it refers to. Anything already at
  // the destination has a complete closure there for the same reason.
  struct Frame {
    ObjectId id;
    StoredObject obj;
    std::vector<ObjectId> children;
    std::size_t next = 0;
  };
  std::unordered_set<ObjectId> seen;
  std::size_t copied = 0;
  for (const auto& head : heads) {
    if (!seen.insert(head).second || to.contains(head)) continue;
    std::vector<Frame> stack;
    auto push = [&](const ObjectId& id) {
      auto obj = from.try_get(id);
      if (!obj) throw Error(Errc::DanglingReference, id.hex() + " is missing at the source");
      auto kids = children_of(*obj);
      stack.push_back({id, std::move(*obj), std::move(kids), 0});
    };
    push(head);
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next < top.children.size()) {
        ObjectId c = top.children[top.next++];
        if (seen.insert(c).second && !to.contains(c)) push(c);
        continue;
      }
      to.put(top.obj.kind, top.obj.payload);
      ++copied;
      stack.pop_back();
    }
  }
  audit_closure(to, heads);
  return copied;
}

}  // namespace vcs
