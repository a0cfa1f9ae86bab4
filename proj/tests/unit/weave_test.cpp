#include <map>

#include "support/test_support.hpp"
#include "vcs/textdiff.hpp"
#include "vcs/weave.hpp"

using namespace vcs;
using vcs::test::Rng;

namespace {

Lines L(std::initializer_list<const char*> items) {
  Lines out;
  for (const char* s : items) out.push_back(s);
  return out;
}

Weave build(const std::vector<vcs::test::HistoryRev>& history) {
  Weave w;
  for (const auto& rev : history) w.add(rev.id, std::span<const std::string>(rev.parents), rev.content);
  return w;
}

// Per-line introducing revision by walking parent -> child diffs from the root.
std::map<std::string, std::vector<std::string>> diff_walk_annotations(
    const std::vector<vcs::test::HistoryRev>& history) {
  std::map<std::string, std::vector<std::string>> ann;
  std::map<std::string, const Lines*> snap;
  for (const auto& rev : history) {
    snap[rev.id] = &rev.content;
    std::vector<std::string> mine(rev.content.size(), rev.id);
    if (!rev.parents.empty()) {
      const auto& parent = rev.parents.front();
      for (const auto& m : script_matches(myers_diff(*snap[parent], rev.content)))
        mine[m.b] = ann[parent][m.a];
    }
    ann[rev.id] = mine;
  }
  return ann;
}

}  // namespace

TEST_CASE("root revision extracts and annotates to itself") {
  Weave w;
  Lines content = L({"x\n", "y\n", "z"});
  w.add("root", std::nullopt, content);
  CHECK(w.extract("root") == content);
  for (const auto& a : w.annotate("root")) CHECK(a.rev == "root");
  CHECK_ERRC(w.extract("nope"), Errc::UnknownRevision);
  CHECK_ERRC(w.annotate("nope"), Errc::UnknownRevision);
}

TEST_CASE("identical child adds nothing") {
  Weave w;
  w.add("a", std::nullopt, L({"1\n", "2\n"}));
  auto before = w.lines();
  w.add("b", std::string("a"), L({"1\n", "2\n"}));
  CHECK(w.lines() == before);
  CHECK(w.extract("b") == L({"1\n", "2\n"}));
}

TEST_CASE("changed middle line is attributed to the child") {
  Weave w;
  w.add("p", std::nullopt, L({"one\n", "two\n", "three\n"}));
  w.add("c", std::string("p"), L({"one\n", "TWO\n", "three\n"}));
  auto ann = w.annotate("c");
  REQUIRE(ann.size() == 3);
  CHECK(ann[0].rev == "p");
  CHECK(ann[1].rev == "c");
  CHECK(ann[2].rev == "p");
  CHECK(w.extract("p") == L({"one\n", "two\n", "three\n"}));
}

TEST_CASE("add validates revisions") {
  Weave w;
  w.add("a", std::nullopt, L({"1\n"}));
  CHECK_ERRC(w.add("a", std::nullopt, L({})), Errc::DuplicateRevision);
  CHECK_ERRC(w.add("b", std::string("zz"), L({})), Errc::UnknownParent);
  CHECK_ERRC(w.add("has space", std::nullopt, L({})), Errc::InvalidArgument);
  CHECK_ERRC(w.add("c", std::string("a"), L({"no newline", "x\n"})), Errc::InvalidArgument);
  CHECK_FALSE(w.contains("b"));
}

TEST_CASE("serialization matches the golden file") {
  Weave w;
  w.add("r1", std::nullopt, L({"a\n", "b\n", "c\n"}));
  w.add("r2", std::string("r1"), L({"a\n", "B\n", "c\n"}));
  w.add("r3", std::string("r1"), L({"b\n", "c\n", "d"}));
  std::vector<std::string> both{"r2", "r3"};
  w.add("r4", std::span<const std::string>(both), L({"B\n", "c\n", "d"}));
  CHECK(w.extract("r4") == L({"B\n", "c\n", "d"}));
  CHECK(w.extract("r3") == L({"b\n", "c\n", "d"}));

  std::string golden = vcs::test::read_golden("weave_small.weave");
  CHECK(w.serialize() == golden);
  Weave back = Weave::parse(golden);
  CHECK(back == w);
  CHECK(back.extract("r2") == L({"a\n", "B\n", "c\n"}));
}

TEST_CASE("parse rejects malformed text") {
  CHECK_ERRC(Weave::parse(""), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 2\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a\nI b n x\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a\nI a x x\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a\nI a n x\nD a 1\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a\nR b c\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a\nI a n x\nD a 0\nI a n y\n"), Errc::MalformedWeave);
  CHECK_ERRC(Weave::parse("weave 1\nR a"), Errc::MalformedWeave);
  CHECK(Weave::parse("weave 1\n").lines().empty());
}

TEST_CASE("linear random histories match snapshots and the diff-walk oracle") {
  Rng rng(21);
  for (int round = 0; round < 30; ++round) {
    std::vector<vcs::test::HistoryRev> history;
    Lines content = vcs::test::random_lines(rng, 10, 5);
    for (int r = 0; r < 20; ++r) {
      vcs::test::HistoryRev rev{"v" + std::to_string(r), {}, content};
      if (r > 0) rev.parents.push_back(history.back().id);
      history.push_back(rev);
      content = vcs::test::mutate_lines(rng, content, 1 + static_cast<int>(rng() % 3), rev.id);
    }
    Weave w = build(history);
    auto oracle = diff_walk_annotations(history);
    for (const auto& rev : history) {
      CHECK(w.extract(rev.id) == rev.content);
      auto ann = w.annotate(rev.id);
      REQUIRE(ann.size() == rev.content.size());
      for (std::size_t k = 0; k < ann.size(); ++k) {
        CHECK(ann[k].text == rev.content[k]);
        CHECK(ann[k].rev == oracle[rev.id][k]);
      }
    }
  }
}

TEST_CASE("branched histories with merges keep every snapshot") {
  Rng rng(22);
  for (int round = 0; round < 60; ++round) {
    auto history = vcs::test::random_history(rng, 2 + rng() % 29, true);
    Weave w;
    std::size_t previous_size = 0;
    for (std::size_t r = 0; r < history.size(); ++r) {
      const auto& rev = history[r];
      w.add(rev.id, std::span<const std::string>(rev.parents), rev.content);
      CHECK(w.lines().size() >= previous_size);
      previous_size = w.lines().size();
      // earlier revisions are unaffected by the addition
      for (std::size_t k = 0; k <= r; ++k) REQUIRE(w.extract(history[k].id) == history[k].content);
    }
    Weave round_trip = Weave::parse(w.serialize());
    CHECK(round_trip == w);
  }
}
