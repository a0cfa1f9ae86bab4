#include <algorithm>

#include "support/test_support.hpp"
#include "vcs/merge.hpp"
#include "vcs/patchio.hpp"

using namespace vcs;
using vcs::test::Rng;

namespace {

Lines numbered(std::size_t n, const std::string& prefix = "line ") {
  Lines out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i) + "\n");
  return out;
}

std::string apply_one(const std::string& patch, const std::string& source, std::vector<HunkReport>* reports = nullptr) {
  auto parsed = parse_unified(patch);
  REQUIRE(parsed.files.size() == 1);
  return join_lines(apply_file_patch(split_lines(source), parsed.files[0], kDefaultMaxFuzz, reports));
}

void check_hunk_counts(const UnifiedPatch& p) {
  for (const auto& f : p.files)
    for (const auto& h : f.hunks) {
      std::size_t ctx = 0, del = 0, ins = 0;
      for (const auto& l : h.lines) (l.tag == ' ' ? ctx : l.tag == '-' ? del : ins)++;
      CHECK(ctx + del == h.a_len);
      CHECK(ctx + ins == h.b_len);
    }
}

}  // namespace

TEST_CASE("unified: equal inputs") {
  Lines a = numbered(4);
  CHECK(emit_unified(a, a, "a/f", "b/f").empty());
  UnifiedOptions opts;
  opts.headers_when_equal = true;
  CHECK(emit_unified(a, a, "a/f", "b/f", opts) == "--- a/f\n+++ b/f\n");
}

TEST_CASE("unified: single changed line") {
  Lines a = numbered(10);
  Lines b = a;
  b[4] = "five\n";
  CHECK(emit_unified(a, b, "a/f", "b/f") ==
        "--- a/f\n+++ b/f\n@@ -2,7 +2,7 @@\n line 2\n line 3\n line 4\n-line 5\n+five\n line 6\n line 7\n line 8\n");
}

TEST_CASE("unified: hunks split only when the gap exceeds twice the context") {
  Lines a = numbered(30);
  Lines b = a;
  b[5] = "x\n";
  b[12] = "y\n";  // 6 unchanged lines between: one hunk
  auto p = parse_unified(emit_unified(a, b, "a", "b"));
  CHECK(p.files[0].hunks.size() == 1);
  b = a;
  b[5] = "x\n";
  b[13] = "y\n";  // 7 between: two hunks
  p = parse_unified(emit_unified(a, b, "a", "b"));
  CHECK(p.files[0].hunks.size() == 2);
  UnifiedOptions wide;
  wide.context = 4;
  CHECK(parse_unified(emit_unified(a, b, "a", "b", wide)).files[0].hunks.size() == 1);
}

TEST_CASE("unified: edge cases of the header and trailer") {
  CHECK(emit_unified({}, Lines{"a\n", "b\n"}, "/dev/null", "b/new") ==
        "--- /dev/null\n+++ b/new\n@@ -0,0 +1,2 @@\n+a\n+b\n");
  CHECK(emit_unified(Lines{"a\n", "b"}, Lines{"a\n", "b\n"}, "a/f", "b/f") ==
        "--- a/f\n+++ b/f\n@@ -1,2 +1,2 @@\n a\n-b\n\\ No newline at end of file\n+b\n");
  auto p = parse_unified("--- a/f\n+++ b/f\n@@ -1 +1 @@\n-x\n\\ No newline at end of file\n+y\n");
  REQUIRE(p.files[0].hunks.size() == 1);
  CHECK(p.files[0].hunks[0].lines == std::vector<HunkLine>{{'-', "x"}, {'+', "y\n"}});
  CHECK(apply_one("--- a/f\n+++ b/f\n@@ -1 +1 @@\n-x\n\\ No newline at end of file\n+y\n", "x") == "y\n");
}

TEST_CASE("unified: metadata lines are ignored") {
  std::string text =
      "diff --git a/f b/f\nindex 123..456\nrename from g\n--- a/f\n+++ b/f\n@@ -1,2 +1,2 @@ context text\n a\n-b\n+c\n"
      "trailing commentary\n";
  auto p = parse_unified(text);
  REQUIRE(p.files.size() == 1);
  CHECK(p.files[0].old_path == "a/f");
  CHECK(apply_one(text, "a\nb\n") == "a\nc\n");
}

TEST_CASE("unified: malformed patches") {
  CHECK_ERRC(parse_unified("--- a\n+++ b\n@@ -1,2 +1,2 @@\n a\n"), Errc::MalformedPatch);
  CHECK_ERRC(parse_unified("--- a\n+++ b\n@@ -x +1 @@\n"), Errc::MalformedPatch);
  CHECK_ERRC(parse_unified("@@ -1 +1 @@\n-a\n+b\n"), Errc::MalformedPatch);
  CHECK_ERRC(parse_unified("--- a\n+++ b\n@@ -1 +1 @@\n-a\n?b\n"), Errc::MalformedPatch);
}

TEST_CASE("unified: emit then apply reproduces the target") {
  Rng rng(61);
  for (int iter = 0; iter < 1500; ++iter) {
    Lines a = vcs::test::random_lines(rng, 60, 6);
    Lines b = vcs::test::mutate_lines(rng, a, 1 + static_cast<int>(rng() % 6), "t");
    if (rng() % 5 == 0 && !b.empty()) b.back().pop_back();
    auto algo = static_cast<DiffAlgorithm>(iter % 3);
    UnifiedOptions opts;
    opts.algorithm = algo;
    opts.context = rng() % 4;
    std::string text = emit_unified(a, b, "a/f", "b/f", opts);
    if (a == b) {
      CHECK(text.empty());
      continue;
    }
    auto parsed = parse_unified(text);
    check_hunk_counts(parsed);
    std::vector<HunkReport> reports;
    CHECK(apply_file_patch(a, parsed.files[0], 0, &reports) == b);
    for (const auto& r : reports) {
      CHECK(r.offset == 0);
      CHECK(r.fuzz == 0);
    }
  }
}

TEST_CASE("unified: unrelated lines inserted above shift the hunk") {
  Lines a = numbered(20);
  Lines b = a;
  b[10] = "changed\n";
  std::string patch = emit_unified(a, b, "a/f", "b/f");
  Lines shifted = numbered(5, "extra ");
  shifted.insert(shifted.end(), a.begin(), a.end());
  std::vector<HunkReport> reports;
  std::string out = apply_one(patch, join_lines(shifted), &reports);
  Lines expected = numbered(5, "extra ");
  expected.insert(expected.end(), b.begin(), b.end());
  CHECK(out == join_lines(expected));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].offset == 5);
  CHECK(reports[0].fuzz == 0);

  // random prefix insertions on multi-hunk patches: pure offsets
  Rng rng(67);
  for (int iter = 0; iter < 300; ++iter) {
    Lines base = numbered(80);
    Lines target = vcs::test::mutate_lines(rng, base, 2 + static_cast<int>(rng() % 4), "m");
    std::string text = emit_unified(base, target, "a/f", "b/f");
    if (text.empty()) continue;
    std::size_t extra = 1 + rng() % 10;
    Lines prefix = numbered(extra, "prefix ");
    Lines src = prefix;
    src.insert(src.end(), base.begin(), base.end());
    Lines want = prefix;
    want.insert(want.end(), target.begin(), target.end());
    std::vector<HunkReport> reps;
    CHECK(apply_one(text, join_lines(src), &reps) == join_lines(want));
    for (const auto& r : reps) {
      CHECK(r.fuzz == 0);
      CHECK(r.offset == static_cast<std::ptrdiff_t>(extra));
    }
  }
}

TEST_CASE("unified: fuzz drops edge context") {
  Lines a = numbered(12);
  Lines b = a;
  b[6] = "seven\n";
  std::string patch = emit_unified(a, b, "a/f", "b/f");
  Lines drifted = a;
  drifted[3] = "LINE 4 edited\n";  // first context line of the hunk
  std::vector<HunkReport> reports;
  Lines want = drifted;
  want[6] = "seven\n";
  CHECK(apply_one(patch, join_lines(drifted), &reports) == join_lines(want));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].fuzz == 1);
  CHECK(reports[0].offset == 0);

  drifted[4] = "LINE 5 edited\n";
  reports.clear();
  apply_one(patch, join_lines(drifted), &reports);
  CHECK(reports[0].fuzz == 2);

  // fuzz never drops changed lines: rewriting the context wholesale fails
  Lines rewritten = numbered(12, "other ");
  CHECK_ERRC(apply_one(patch, join_lines(rewritten)), Errc::HunkFailed);
  auto parsed = parse_unified(patch);
  CHECK_ERRC(apply_file_patch(drifted, parsed.files[0], 0), Errc::HunkFailed);
}

TEST_CASE("unified: multi-file patches, creation and deletion") {
  std::map<std::string, std::string> files{{"keep.txt", "1\n2\n3\n"}, {"gone.txt", "bye\n"}};
  std::string patch = emit_unified(split_lines(files["keep.txt"]), split_lines("1\nTWO\n3\n"), "a/keep.txt", "b/keep.txt") +
                      emit_unified(split_lines("bye\n"), {}, "a/gone.txt", "/dev/null") +
                      emit_unified({}, split_lines("hello\n"), "/dev/null", "b/new.txt");
  auto result = apply_unified(parse_unified(patch), files);
  CHECK(result.files == std::map<std::string, std::string>{{"keep.txt", "1\nTWO\n3\n"}, {"new.txt", "hello\n"}});
  CHECK(result.hunks.size() == 3);
  CHECK_ERRC(apply_unified(parse_unified(patch), {}), Errc::HunkFailed);
  CHECK(patch_path("a/src/x.c") == "src/x.c");
  CHECK(patch_path("/dev/null").empty());
  CHECK(patch_path("plain") == "plain");
}

TEST_CASE("combined diff reproduces the golden fixture") {
  Lines ours = split_lines(vcs::test::read_golden("combined_ours.txt"));
  Lines theirs = split_lines(vcs::test::read_golden("combined_theirs.txt"));
  Lines merged = split_lines(vcs::test::read_golden("combined_merged.txt"));
  CHECK(emit_combined({ours, theirs}, merged, "pkg.sh") == vcs::test::read_golden("combined.diff"));
}

TEST_CASE("combined diff exclusion rule") {
  Lines base = numbered(30);
  CHECK(emit_combined({base, base}, base, "f").empty());

  Lines x = base, y = base;
  x[2] = "x\n";
  y[25] = "y\n";
  auto m = three_way_merge(base, x, y);
  REQUIRE(m.clean);
  CHECK(emit_combined({x, y}, m.lines, "f").empty());

  // a hand resolution differs from both parents and survives
  Lines px = base, py = base;
  px[10] = "from x\n";
  py[10] = "from y\n";
  Lines resolved = base;
  resolved[10] = "both\n";
  std::string out = emit_combined({px, py}, resolved, "f");
  CHECK(out.find("@@@ -8,7 -8,7 +8,7 @@@\n") != std::string::npos);
  CHECK(out.find("\n- from x\n") != std::string::npos);
  CHECK(out.find("\n -from y\n") != std::string::npos);
  CHECK(out.find("\n++both\n") != std::string::npos);

  // three parents, three columns; a line equal in two parents is lost once
  Lines pz = base;
  pz[10] = "from x\n";
  out = emit_combined({px, py, pz}, resolved, "f");
  CHECK(out.find("@@@@ -8,7 -8,7 -8,7 +8,7 @@@@\n") != std::string::npos);
  CHECK(out.find("\n- -from x\n") != std::string::npos);
  CHECK(out.find("\n+++both\n") != std::string::npos);

  CHECK_ERRC(emit_combined({base}, base, "f"), Errc::InvalidArgument);
}

TEST_CASE("occurrence counting") {
  CHECK(count_occurrences("aaaa", "aa") == 2);
  CHECK(count_occurrences("abcabc", "abc") == 2);
  CHECK(count_occurrences("", "x") == 0);
  Rng rng(71);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string hay, needle;
    for (std::size_t k = rng() % 40; k > 0; --k) hay += static_cast<char>('a' + rng() % 3);
    for (std::size_t k = 1 + rng() % 3; k > 0; --k) needle += static_cast<char>('a' + rng() % 3);
    CHECK(count_occurrences(hay, needle) == vcs::test::count_occurrences(hay, needle));
  }
}

TEST_CASE("pickaxe") {
  using Tree = std::map<std::string, std::string>;
  std::map<ObjectId, Tree> trees;
  auto id = [](const char* s) { return hash_object(ObjectKind::Commit, s); };
  ObjectId c1 = id("c1"), c2 = id("c2"), c3 = id("c3"), c4 = id("c4"), c5 = id("c5");
  trees[c1] = {{"a.c", "int main() {}\n"}};
  trees[c2] = {{"a.c", "int main() {}\nvoid helper_fn() {}\n"}};
  trees[c3] = {{"a.c", "int main() {}\n"}, {"b.c", "void helper_fn() {}\n"}};
  trees[c4] = {{"a.c", "int main() { return 1; }\n"}};
  trees[c5] = {{"a.c", "int main() { return 1; }\n"}, {"b.c", "void helper_fn() {}\n"}};
  std::vector<PickaxeCommit> commits{{c1, {}}, {c2, {c1}}, {c3, {c2}}, {c4, {c1}}, {c5, {c3, c4}}};
  FilesOf files_of = [&](const ObjectId& c) { return trees.at(c); };

  CHECK(pickaxe(commits, files_of, "nowhere").empty());
  auto hits = pickaxe(commits, files_of, "helper_fn");
  REQUIRE(hits.size() == 4);
  CHECK(hits[0] == PickaxeHit{c2, "a.c", PickaxeChange::Added, 0, 1});
  CHECK(hits[1] == PickaxeHit{c3, "a.c", PickaxeChange::Removed, 1, 0});
  CHECK(hits[2] == PickaxeHit{c3, "b.c", PickaxeChange::Added, 0, 1});
  // merge: unchanged against c3, but adds the function relative to c4
  CHECK(hits[3] == PickaxeHit{c5, "b.c", PickaxeChange::Added, 0, 1});

  hits = pickaxe(commits, files_of, "main");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].commit == c1);
  CHECK_ERRC(pickaxe(commits, files_of, ""), Errc::InvalidArgument);
}
