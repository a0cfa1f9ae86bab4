#include <fstream>
#include <map>

#include "support/test_support.hpp"
#include "vcs/bytes.hpp"
#include "vcs/loose_store.hpp"

using namespace vcs;
using vcs::test::Rng;
using vcs::test::TempDir;

TEST_CASE("loose store round trips a 1 MiB blob") {
  TempDir dir;
  LooseStore store(dir / "objects");
  Rng rng(1);
  std::string big = vcs::test::random_bytes(rng, 1 << 20);
  ObjectId id = store.put(ObjectKind::Blob, big);
  CHECK(id == hash_object(ObjectKind::Blob, big));
  StoredObject got = store.get(id);
  CHECK(got.kind == ObjectKind::Blob);
  CHECK(got.payload == big);
  CHECK(store.path_for(id) == dir / "objects" / id.hex().substr(0, 2) / id.hex().substr(2));
  // idempotent
  CHECK(store.put(ObjectKind::Blob, big) == id);
}

TEST_CASE("unknown ids and corrupted files are reported") {
  TempDir dir;
  LooseStore store(dir / "objects");
  CHECK_ERRC(store.get(hash_object(ObjectKind::Blob, "nope")), Errc::UnknownObject);
  CHECK_FALSE(store.try_get(hash_object(ObjectKind::Blob, "nope")).has_value());

  ObjectId id = store.put(ObjectKind::Blob, "hello world\n");
  auto path = store.path_for(id);
  std::string raw = read_file(path);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string flipped = raw;
    flipped[i] = static_cast<char>(flipped[i] ^ 0xFF);
    std::filesystem::permissions(path, std::filesystem::perms::owner_all,
                                 std::filesystem::perm_options::add);
    write_file_atomic(path, flipped);
    CHECK_ERRC(store.get(id), Errc::CorruptObject);
  }
  write_file_atomic(path, raw);
  CHECK(store.get(id).payload == "hello world\n");
}

TEST_CASE("puts never disturb earlier objects") {
  TempDir dir;
  LooseStore store(dir / "objects");
  Rng rng(3);
  std::map<ObjectId, std::string> seen;
  for (int i = 0; i < 100; ++i) {
    std::string payload = vcs::test::random_bytes(rng, rng() % 200);
    seen[store.put(ObjectKind::Blob, payload)] = payload;
    for (const auto& [id, content] : seen) REQUIRE(store.get(id).payload == content);
  }
  auto listed = store.list();
  CHECK(listed.size() == seen.size());
}

TEST_CASE("prefix resolution agrees with a linear scan") {
  TempDir dir;
  LooseStore store(dir / "objects");
  Rng rng(5);
  std::vector<ObjectId> ids;
  for (int i = 0; i < 300; ++i) ids.push_back(store.put(ObjectKind::Blob, std::to_string(i)));

  for (const auto& id : ids) {
    CHECK(store.resolve_prefix(id.hex()) == id);
    for (std::size_t len = 4; len <= 8; ++len) {
      std::string prefix = id.hex().substr(0, len);
      std::size_t matches = 0;
      for (const auto& other : ids)
        if (other.hex().compare(0, len, prefix) == 0) ++matches;
      if (matches == 1) {
        CHECK(store.resolve_prefix(prefix) == id);
      } else {
        CHECK_ERRC(store.resolve_prefix(prefix), Errc::Ambiguous);
      }
    }
  }
  CHECK_ERRC(store.resolve_prefix("abc"), Errc::InvalidArgument);
  CHECK_ERRC(store.resolve_prefix("xyzw"), Errc::InvalidArgument);
}

TEST_CASE("two objects sharing a 4-digit prefix are ambiguous") {
  TempDir dir;
  LooseStore store(dir / "objects");
  // Birthday search: 65536 possible 4-hex prefixes.
  std::map<std::string, std::pair<ObjectId, std::string>> by_prefix;
  std::optional<std::pair<ObjectId, ObjectId>> pair;
  for (int i = 0; !pair; ++i) {
    std::string payload = "candidate " + std::to_string(i);
    ObjectId id = hash_object(ObjectKind::Blob, payload);
    auto [it, fresh] = by_prefix.emplace(id.hex().substr(0, 4), std::make_pair(id, payload));
    if (!fresh) {
      store.put(ObjectKind::Blob, it->second.second);
      store.put(ObjectKind::Blob, payload);
      pair = {it->second.first, id};
    }
  }
  std::string prefix = pair->first.hex().substr(0, 4);
  CHECK_ERRC(store.resolve_prefix(prefix), Errc::Ambiguous);
  CHECK(store.resolve_prefix(pair->first.hex()) == pair->first);
  CHECK(store.resolve_prefix(pair->second.hex()) == pair->second);

  std::vector<ObjectId> ids{pair->first, pair->second};
  CHECK_ERRC(resolve_prefix(ids, prefix), Errc::Ambiguous);
  CHECK_ERRC(resolve_prefix(ids, "0000000000"), Errc::UnknownObject);
}
