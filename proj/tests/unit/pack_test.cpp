#include <algorithm>

#include "support/test_support.hpp"
#include "vcs/bytes.hpp"
#include "vcs/pack.hpp"

using namespace vcs;
using vcs::test::Rng;

namespace {

PackObject blob(const std::string& content, const std::string& path) {
  return {hash_object(ObjectKind::Blob, content), ObjectKind::Blob, content, path};
}

std::vector<PackObject> reachable(const vcs::test::SyntheticRepo& repo) {
  return collect_reachable(repo.heads, [&](const ObjectId& id) -> std::optional<StoredObject> {
    auto it = repo.objects.find(id);
    if (it == repo.objects.end()) return std::nullopt;
    return it->second;
  });
}

std::size_t loose_size(const PackObject& obj) {
  return zlib_compress(object_header(obj.kind, obj.payload.size()) + obj.payload).size();
}

}  // namespace

TEST_CASE("candidate order groups by trailing name characters") {
  std::vector<PackObject> objs{blob("1", "a/x.c"), blob("22", "b/y.c"), blob("333", "a/z.h")};
  auto order = delta_candidate_order(objs);
  CHECK(order == std::vector<std::size_t>{0, 1, 2});
  std::vector<PackObject> shuffled{objs[2], objs[0], objs[1]};
  order = delta_candidate_order(shuffled);
  // the two .c files are adjacent and ahead of the .h file
  CHECK(shuffled[order[0]].path == "a/x.c");
  CHECK(shuffled[order[1]].path == "b/y.c");
  CHECK(shuffled[order[2]].path == "a/z.h");

  std::vector<PackObject> sizes{blob(std::string(10, 'x'), "f"), blob(std::string(99, 'y'), "f")};
  CHECK(delta_candidate_order(sizes) == std::vector<std::size_t>{1, 0});

  std::vector<PackObject> one{blob("only", "p")};
  CHECK(delta_candidate_order(one) == std::vector<std::size_t>{0});

  Commit c;
  c.tree = objs[0].id;
  c.author = "a";
  c.message = "m";
  std::string payload = serialize_commit(c);
  std::vector<PackObject> mixed{objs[0], {hash_object(ObjectKind::Commit, payload), ObjectKind::Commit, payload, ""}};
  CHECK(delta_candidate_order(mixed) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("single object pack") {
  std::vector<PackObject> objs{blob("hello\n", "greeting")};
  auto built = build_pack(objs);
  CHECK(built.delta_count == 0);
  auto reader = PackReader::from_bytes(built.pack, built.index);
  CHECK(reader.size() == 1);
  CHECK(reader.read(objs[0].id).payload == "hello\n");
  CHECK(built.pack.substr(0, 12) == std::string("VPAK\x01\x00\x00\x00\x00\x00\x00\x01", 12));
  CHECK_ERRC(reader.read(hash_object(ObjectKind::Blob, "other")), Errc::UnknownObject);
}

TEST_CASE("single-file history packs smaller than loose objects") {
  Rng rng(1);
  std::vector<PackObject> objs;
  Lines text = vcs::test::random_lines(rng, 0, 2);
  for (int i = 0; i < 200; ++i) text.push_back("line " + std::to_string(i) + " " + std::to_string(rng()) + "\n");
  std::size_t loose_total = 0;
  for (int r = 0; r < 50; ++r) {
    text = vcs::test::mutate_lines(rng, text, 1 + static_cast<int>(rng() % 3), "r" + std::to_string(r));
    PackObject o = blob(join_lines(text), "src/file.txt");
    if (std::any_of(objs.begin(), objs.end(), [&](const PackObject& p) { return p.id == o.id; })) continue;
    loose_total += loose_size(o);
    objs.push_back(o);
  }
  auto built = build_pack(objs);
  CHECK(built.pack.size() < loose_total);
  CHECK(built.delta_count > 0);
  auto reader = PackReader::from_bytes(built.pack, built.index);
  for (const auto& o : objs) CHECK(reader.read(o.id).payload == o.payload);
}

TEST_CASE("synthetic repository round trip, layout and determinism") {
  Rng rng(2);
  auto repo = vcs::test::synthetic_repo(rng, 200);
  auto objs = reachable(repo);
  CHECK(objs.size() == repo.objects.size());
  // breadth-first from the heads: the first head comes first
  CHECK(objs.front().id == repo.heads.front());

  auto built = build_pack(objs);
  auto again = build_pack(objs);
  CHECK(built.pack == again.pack);
  CHECK(built.index == again.index);

  auto reader = PackReader::from_bytes(built.pack, built.index);
  std::size_t loose_total = 0;
  for (const auto& [id, stored] : repo.objects) {
    CHECK(reader.read(id) == stored);
    loose_total += zlib_compress(object_header(stored.kind, stored.payload.size()) + stored.payload).size();
  }
  CHECK(built.pack.size() < loose_total);

  auto infos = reader.entries();
  std::map<ObjectId, std::uint64_t> offset_of;
  for (const auto& e : infos) offset_of[e.id] = e.offset;
  std::size_t max_depth = 0;
  for (const auto& e : infos) {
    if (e.base) CHECK(offset_of.at(*e.base) < e.offset);
    max_depth = std::max(max_depth, e.depth);
  }
  CHECK(max_depth <= kDefaultPackDepth);
  CHECK(max_depth == built.max_depth);

  auto ids = reader.ids();
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(ids.size() == repo.objects.size());
}

TEST_CASE("depth cap is respected") {
  Rng rng(3);
  std::vector<PackObject> objs;
  std::string text = vcs::test::random_bytes(rng, 4000);
  for (int r = 0; r < 40; ++r) {
    text = vcs::test::mutate_bytes(rng, text, 1);
    objs.push_back(blob(text, "blob.bin"));
  }
  std::sort(objs.begin(), objs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  objs.erase(std::unique(objs.begin(), objs.end(), [](const auto& a, const auto& b) { return a.id == b.id; }),
             objs.end());
  for (std::size_t depth : {1u, 2u, 5u}) {
    auto built = build_pack(objs, 10, depth);
    auto reader = PackReader::from_bytes(built.pack, built.index);
    for (const auto& e : reader.entries()) CHECK(e.depth <= depth);
    for (const auto& o : objs) CHECK(reader.read(o.id).payload == o.payload);
  }
  auto no_window = build_pack(objs, 0, 10);
  CHECK(no_window.delta_count == 0);
}

TEST_CASE("dangling references are rejected") {
  Rng rng(4);
  auto repo = vcs::test::synthetic_repo(rng, 30);
  auto objs = reachable(repo);
  auto victim = std::find_if(objs.begin(), objs.end(), [](const PackObject& o) { return o.kind == ObjectKind::Blob; });
  ObjectId missing = victim->id;
  objs.erase(victim);
  CHECK_ERRC(build_pack(objs), Errc::DanglingReference);
  repo.objects.erase(missing);
  CHECK_ERRC(reachable(repo), Errc::DanglingReference);
}

TEST_CASE("corruption is detected") {
  Rng rng(5);
  auto repo = vcs::test::synthetic_repo(rng, 60);
  auto objs = reachable(repo);
  auto built = build_pack(objs);
  auto reader = PackReader::from_bytes(built.pack, built.index);
  auto infos = reader.entries();

  // whole-file checksum catches any flipped byte at open
  std::string flipped = built.pack;
  flipped[flipped.size() / 2] ^= 0x10;
  CHECK_ERRC(PackReader::from_bytes(flipped, built.index), Errc::CorruptPack);
  std::string bad_index = built.index;
  bad_index[20] ^= 0x01;
  CHECK_ERRC(PackReader::from_bytes(built.pack, bad_index), Errc::CorruptPack);

  // without the checksum, per-object verification still refuses bad content
  for (const auto& info : infos) {
    std::string damaged = built.pack;
    std::size_t at = info.offset + 1 + (info.base ? 21 : 1) + 1 + 5;  // inside the zlib stream
    if (at >= damaged.size() - 20) continue;
    damaged[at] = static_cast<char>(damaged[at] ^ 0xFF);
    auto unchecked = PackReader::from_bytes(damaged, built.index, false);
    auto code = vcs::test::error_code_of([&] { (void)unchecked.read(info.id); });
    if (code) {
      CHECK(code == Errc::CorruptPack);
    } else {
      CHECK(unchecked.read(info.id) == repo.objects.at(info.id));
    }
  }
}
