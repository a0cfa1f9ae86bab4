#include "vcs/object.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "vcs/bytes.hpp"
#include "vcs/error.hpp"

namespace vcs {

std::optional<ObjectId> ObjectId::from_raw(std::string_view raw) {
  if (raw.size() != kSize) return std::nullopt;
  std::array<std::uint8_t, kSize> bytes{};
  std::copy(raw.begin(), raw.end(), bytes.begin());
  return ObjectId(bytes);
}

std::optional<ObjectId> ObjectId::from_hex(std::string_view hex) {
  if (hex.size() != kHexSize) return std::nullopt;
  auto raw = vcs::from_hex(hex);
  if (!raw) return std::nullopt;
  return from_raw(*raw);
}

std::string ObjectId::hex() const { return to_hex(raw()); }

bool ObjectId::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::string_view kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Blob: return "blob";
    case ObjectKind::Tree: return "tree";
    case ObjectKind::Commit: return "commit";
  }
  return "?";
}

std::optional<ObjectKind> kind_from_name(std::string_view name) {
  if (name == "blob") return ObjectKind::Blob;
  if (name == "tree") return ObjectKind::Tree;
  if (name == "commit") return ObjectKind::Commit;
  return std::nullopt;
}

std::string object_header(ObjectKind kind, std::size_t length) {
  std::string header(kind_name(kind));
  header += ' ';
  header += std::to_string(length);
  header += '\0';
  return header;
}

ObjectId hash_object(ObjectKind kind, std::string_view payload) {
  std::string framed = object_header(kind, payload.size());
  framed.append(payload);
  return ObjectId(sha1(framed));
}

const TreeEntry* Tree::find(std::string_view name) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), name,
                             [](const TreeEntry& e, std::string_view n) { return e.name < n; });
  if (it == entries.end() || it->name != name) return nullptr;
  return &*it;
}

std::string Commit::subject() const { return message.substr(0, message.find('\n')); }

namespace {

constexpr std::string_view kModeNormal = "100644";
constexpr std::string_view kModeExecutable = "100755";
constexpr std::string_view kModeTree = "40000";

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedObject, what); }

void validate_entry_name(std::string_view name) {
  if (name.empty() || name == "." || name == ".." ||
      name.find_first_of(std::string_view("/\0\n", 3)) != std::string_view::npos)
    malformed("invalid tree entry name '" + std::string(name) + "'");
}

std::string_view mode_string(const TreeEntry& entry) {
  if (entry.kind == ObjectKind::Tree) return kModeTree;
  return entry.mode == FileMode::Executable ? kModeExecutable : kModeNormal;
}

std::string_view take_line(std::string_view& rest) {
  auto nl = rest.find('\n');
  if (nl == std::string_view::npos) malformed("unterminated commit header line");
  auto line = rest.substr(0, nl);
  rest.remove_prefix(nl + 1);
  return line;
}

ObjectId parse_hex_id(std::string_view hex) {
  // Canonical ids are lowercase.
  auto id = ObjectId::from_hex(hex);
  if (!id || id->hex() != hex) malformed("bad object id '" + std::string(hex) + "'");
  return *id;
}

}  // namespace

Tree make_tree(std::vector<TreeEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const TreeEntry& a, const TreeEntry& b) { return a.name < b.name; });
  return Tree{std::move(entries)};
}

std::string serialize_tree(const Tree& tree) {
  std::string out;
  for (std::size_t i = 0; i < tree.entries.size(); ++i) {
    const auto& entry = tree.entries[i];
    validate_entry_name(entry.name);
    if (i > 0 && !(tree.entries[i - 1].name < entry.name))
      malformed("tree entries not strictly sorted at '" + entry.name + "'");
    if (entry.kind == ObjectKind::Commit) malformed("tree entry cannot reference a commit");
    if (entry.kind == ObjectKind::Tree && entry.mode != FileMode::Normal)
      malformed("directory entry cannot be executable");
    out += mode_string(entry);
    out += ' ';
    out += entry.name;
    out += '\0';
    out += entry.id.raw();
  }
  return out;
}

Tree parse_tree(std::string_view payload) {
  Tree tree;
  while (!payload.empty()) {
    auto space = payload.find(' ');
    if (space == std::string_view::npos) malformed("tree entry without mode");
    auto mode = payload.substr(0, space);
    payload.remove_prefix(space + 1);
    auto nul = payload.find('\0');
    if (nul == std::string_view::npos || payload.size() < nul + 1 + ObjectId::kSize)
      malformed("truncated tree entry");
    TreeEntry entry;
    entry.name = std::string(payload.substr(0, nul));
    entry.id = *ObjectId::from_raw(payload.substr(nul + 1, ObjectId::kSize));
    payload.remove_prefix(nul + 1 + ObjectId::kSize);
    if (mode == kModeNormal) {
      entry.kind = ObjectKind::Blob;
    } else if (mode == kModeExecutable) {
      entry.kind = ObjectKind::Blob;
      entry.mode = FileMode::Executable;
    } else if (mode == kModeTree) {
      entry.kind = ObjectKind::Tree;
    } else {
      malformed("unknown tree mode '" + std::string(mode) + "'");
    }
    validate_entry_name(entry.name);
    if (!tree.entries.empty() && !(tree.entries.back().name < entry.name))
      malformed("tree entries not strictly sorted at '" + entry.name + "'");
    tree.entries.push_back(std::move(entry));
  }
  return tree;
}

std::string serialize_commit(const Commit& commit) {
  if (commit.author.empty() || commit.author.find('\n') != std::string::npos)
    malformed("commit author must be a single non-empty line");
  std::set<ObjectId> seen;
  std::string out = "tree " + commit.tree.hex() + "\n";
  for (const auto& parent : commit.parents) {
    if (!seen.insert(parent).second) malformed("duplicate parent " + parent.hex());
    out += "parent " + parent.hex() + "\n";
  }
  out += "author " + commit.author + " " + std::to_string(commit.timestamp) + "\n\n";
  out += commit.message;
  return out;
}

Commit parse_commit(std::string_view payload) {
  Commit commit;
  auto line = take_line(payload);
  if (!line.starts_with("tree ")) malformed("commit must start with a tree line");
  commit.tree = parse_hex_id(line.substr(5));

  std::set<ObjectId> seen;
  line = take_line(payload);
  while (line.starts_with("parent ")) {
    auto parent = parse_hex_id(line.substr(7));
    if (!seen.insert(parent).second) malformed("duplicate parent " + parent.hex());
    commit.parents.push_back(parent);
    line = take_line(payload);
  }

  if (!line.starts_with("author ")) malformed("missing author line");
  auto author = line.substr(7);
  auto space = author.rfind(' ');
  if (space == std::string_view::npos || space == 0) malformed("author line without timestamp");
  commit.author = std::string(author.substr(0, space));
  auto ts = author.substr(space + 1);
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), commit.timestamp);
  if (ec != std::errc() || ptr != ts.data() + ts.size() ||
      std::to_string(commit.timestamp) != ts)
    malformed("bad commit timestamp '" + std::string(ts) + "'");

  if (take_line(payload) != "") malformed("missing blank line before message");
  commit.message = std::string(payload);
  return commit;
}

}  // namespace vcs
