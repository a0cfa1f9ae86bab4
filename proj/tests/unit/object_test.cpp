#include <map>

#include "support/test_support.hpp"
#include "vcs/bytes.hpp"
#include "vcs/object.hpp"

using namespace vcs;
using vcs::test::Rng;

namespace {

ObjectId blob_id(std::string_view content) { return hash_object(ObjectKind::Blob, content); }

Commit sample_commit(const ObjectId& tree) {
  Commit c;
  c.tree = tree;
  c.author = "Ada <ada@example.org>";
  c.timestamp = 1700000000;
  c.message = "initial import\n\nbody text\n";
  return c;
}

}  // namespace

TEST_CASE("hash_object is deterministic and kind-sensitive") {
  CHECK(blob_id("") == blob_id(""));
  CHECK(hash_object(ObjectKind::Blob, "xyz") != hash_object(ObjectKind::Tree, "xyz"));
  CHECK(hash_object(ObjectKind::Blob, "xyz") != hash_object(ObjectKind::Commit, "xyz"));
  // git-compatible framing for the empty blob
  CHECK(blob_id("").hex() == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("single byte changes change the id") {
  Rng rng(7);
  std::string payload = vcs::test::random_bytes(rng, 256);
  ObjectId base = blob_id(payload);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    std::string mutated = payload;
    mutated[i] = static_cast<char>(mutated[i] ^ 0x01);
    CHECK(blob_id(mutated) != base);
  }
}

TEST_CASE("commit parent participates in the id") {
  Tree tree = make_tree({{"a.txt", FileMode::Normal, blob_id("a\n"), ObjectKind::Blob}});
  ObjectId tree_id = hash_object(ObjectKind::Tree, serialize_tree(tree));
  Commit c1 = sample_commit(tree_id);
  Commit c2 = c1;
  c1.parents = {blob_id("p1")};
  c2.parents = {blob_id("p2")};
  CHECK(hash_object(ObjectKind::Commit, serialize_commit(c1)) !=
        hash_object(ObjectKind::Commit, serialize_commit(c2)));
}

TEST_CASE("tree and commit serialization is canonical") {
  Tree tree = make_tree({
      {"zeta", FileMode::Executable, blob_id("z"), ObjectKind::Blob},
      {"alpha", FileMode::Normal, blob_id("a"), ObjectKind::Blob},
      {"dir", FileMode::Normal, blob_id("d"), ObjectKind::Tree},
  });
  REQUIRE(tree.entries.size() == 3);
  CHECK(tree.entries[0].name == "alpha");
  std::string bytes = serialize_tree(tree);
  CHECK(parse_tree(bytes) == tree);
  CHECK(serialize_tree(parse_tree(bytes)) == bytes);
  CHECK(tree.find("dir") != nullptr);
  CHECK(tree.find("missing") == nullptr);

  Commit c = sample_commit(hash_object(ObjectKind::Tree, bytes));
  c.parents = {blob_id("x"), blob_id("y")};
  std::string cbytes = serialize_commit(c);
  CHECK(parse_commit(cbytes) == c);
  CHECK(serialize_commit(parse_commit(cbytes)) == cbytes);
  CHECK(c.subject() == "initial import");
}

TEST_CASE("serializers reject non-canonical input") {
  Tree unsorted;
  unsorted.entries = {{"b", FileMode::Normal, blob_id("b"), ObjectKind::Blob},
                      {"a", FileMode::Normal, blob_id("a"), ObjectKind::Blob}};
  CHECK_ERRC(serialize_tree(unsorted), Errc::MalformedObject);
  Tree dup;
  dup.entries = {{"a", FileMode::Normal, blob_id("1"), ObjectKind::Blob},
                 {"a", FileMode::Normal, blob_id("2"), ObjectKind::Blob}};
  CHECK_ERRC(serialize_tree(dup), Errc::MalformedObject);
  Tree slash;
  slash.entries = {{"a/b", FileMode::Normal, blob_id("1"), ObjectKind::Blob}};
  CHECK_ERRC(serialize_tree(slash), Errc::MalformedObject);

  Commit c = sample_commit(blob_id("t"));
  c.parents = {blob_id("p"), blob_id("p")};
  CHECK_ERRC(serialize_commit(c), Errc::MalformedObject);

  Commit ok = sample_commit(blob_id("t"));
  std::string text = serialize_commit(ok);
  std::string upper = text;
  for (std::size_t i = 5; i < 45; ++i) upper[i] = static_cast<char>(std::toupper(upper[i]));
  if (upper != text) CHECK_ERRC(parse_commit(upper), Errc::MalformedObject);
  CHECK_ERRC(parse_commit("garbage"), Errc::MalformedObject);
}

TEST_CASE("cascading identity over randomized single-file edits") {
  // root/{top.txt, src/{lib/{deep.txt}, main.txt}}
  Rng rng(11);
  auto build = [](const std::map<std::string, std::string>& files, std::vector<ObjectId>& path_ids) {
    Tree lib = make_tree({{"deep.txt", FileMode::Normal, blob_id(files.at("deep")), ObjectKind::Blob}});
    ObjectId lib_id = hash_object(ObjectKind::Tree, serialize_tree(lib));
    Tree src = make_tree({{"lib", FileMode::Normal, lib_id, ObjectKind::Tree},
                          {"main.txt", FileMode::Normal, blob_id(files.at("main")), ObjectKind::Blob}});
    ObjectId src_id = hash_object(ObjectKind::Tree, serialize_tree(src));
    Tree root = make_tree({{"src", FileMode::Normal, src_id, ObjectKind::Tree},
                           {"top.txt", FileMode::Normal, blob_id(files.at("top")), ObjectKind::Blob}});
    ObjectId root_id = hash_object(ObjectKind::Tree, serialize_tree(root));
    Commit c;
    c.tree = root_id;
    c.author = "t";
    c.timestamp = 1;
    c.message = "m";
    path_ids = {lib_id, src_id, root_id, hash_object(ObjectKind::Commit, serialize_commit(c))};
  };
  std::map<std::string, std::string> files{{"deep", "d\n"}, {"main", "m\n"}, {"top", "t\n"}};
  std::vector<ObjectId> before;
  build(files, before);
  for (int round = 0; round < 200; ++round) {
    auto edited = files;
    std::string key = std::vector<std::string>{"deep", "main", "top"}[rng() % 3];
    edited[key] += vcs::test::random_bytes(rng, 1 + rng() % 8);
    std::vector<ObjectId> after;
    build(edited, after);
    if (key == "deep") CHECK(after[0] != before[0]);
    if (key != "top") CHECK(after[1] != before[1]);
    if (key == "top") {
      CHECK(after[0] == before[0]);
      CHECK(after[1] == before[1]);
    }
    CHECK(after[2] != before[2]);
    CHECK(after[3] != before[3]);
  }
}

TEST_CASE("varint and hex helpers round trip") {
  for (std::uint64_t v : {0ULL, 1ULL, 127ULL, 128ULL, 300ULL, 1ULL << 35, ~0ULL}) {
    std::string out;
    put_varint(out, v);
    std::size_t pos = 0;
    CHECK(get_varint(out, pos) == v);
    CHECK(pos == out.size());
  }
  std::string truncated;
  put_varint(truncated, 1ULL << 40);
  truncated.pop_back();
  std::size_t pos = 0;
  CHECK_FALSE(get_varint(truncated, pos).has_value());
  CHECK(from_hex(to_hex("\x01\xab")) == std::string("\x01\xab"));
  CHECK_FALSE(from_hex("zz").has_value());
}
