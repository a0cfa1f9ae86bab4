#include <algorithm>
#include <map>
#include <set>

#include "support/test_support.hpp"
#include "vcs/bytes.hpp"
#include "vcs/histdag.hpp"

using namespace vcs;
using vcs::test::Rng;
using vcs::test::TempDir;

namespace {

ObjectId cid(const std::string& label) { return hash_object(ObjectKind::Commit, label); }

struct Fixture {
  HistoryDag dag;
  std::map<std::string, ObjectId> id;

  void add(const std::string& label, std::initializer_list<const char*> parents, std::int64_t ts = 0) {
    std::vector<ObjectId> ps;
    for (const char* p : parents) ps.push_back(id.at(p));
    id[label] = cid(label);
    dag.add_commit(id[label], ps, ts);
  }
  std::vector<ObjectId> ids(std::initializer_list<const char*> labels) const {
    std::vector<ObjectId> out;
    for (const char* l : labels) out.push_back(id.at(l));
    std::sort(out.begin(), out.end());
    return out;
  }
};

// Branch 1 merges 2.2 as 1.2; branch 2 merges that back as 2.3; branch 3
// forks at 2.2 and is merged into branch 2 as 2.4.
Fixture dag_figure() {
  Fixture f;
  f.add("1.1", {});
  f.add("2.1", {"1.1"});
  f.add("2.2", {"2.1"});
  f.add("1.2", {"1.1", "2.2"});
  f.add("2.3", {"2.2", "1.2"});
  f.add("3.1", {"2.2"});
  f.add("3.2", {"3.1"});
  f.add("3.3", {"3.2"});
  f.add("2.4", {"2.3", "3.3"});
  return f;
}

Fixture criss_cross() {
  Fixture f;
  f.add("O", {});
  f.add("X0", {"O"});
  f.add("Y0", {"O"});
  f.add("X1", {"X0", "Y0"});
  f.add("Y1", {"Y0", "X0"});
  return f;
}

struct RandomDag {
  HistoryDag dag;
  std::vector<ObjectId> nodes;
  std::vector<std::vector<std::size_t>> parents;
};

RandomDag random_dag(Rng& rng, std::size_t n) {
  RandomDag r;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> ps;
    if (i > 0 && rng() % 8 != 0) {
      std::size_t count = 1 + rng() % 2;
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t p = rng() % i;
        if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
      }
    }
    std::vector<ObjectId> pid;
    for (auto p : ps) pid.push_back(r.nodes[p]);
    r.nodes.push_back(cid("n" + std::to_string(i) + "-" + std::to_string(rng())));
    r.dag.add_commit(r.nodes.back(), pid, static_cast<std::int64_t>(rng() % 5));
    r.parents.push_back(ps);
  }
  return r;
}

// reach[a][b]: a is an ancestor of b (reflexive), by Floyd-Warshall closure.
std::vector<std::vector<bool>> closure(const RandomDag& r) {
  std::size_t n = r.nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (auto p : r.parents[i]) reach[p][i] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

}  // namespace

TEST_CASE("ancestry basics") {
  Fixture f;
  f.add("root", {});
  f.add("a", {"root"});
  f.add("b", {"root"});
  CHECK(f.dag.is_ancestor(f.id["root"], f.id["a"]));
  CHECK(f.dag.is_ancestor(f.id["root"], f.id["b"]));
  CHECK(f.dag.is_ancestor(f.id["a"], f.id["a"]));
  CHECK_FALSE(f.dag.is_ancestor(f.id["a"], f.id["b"]));
  CHECK_FALSE(f.dag.is_ancestor(f.id["b"], f.id["a"]));
  CHECK(f.dag.lca_candidates(f.id["a"], f.id["b"]) == f.ids({"root"}));
  CHECK_ERRC(f.dag.is_ancestor(cid("ghost"), f.id["a"]), Errc::UnknownCommit);
  CHECK_ERRC(f.dag.add_commit(cid("orphan"), {cid("ghost")}), Errc::UnknownCommit);
  CHECK_ERRC(f.dag.add_commit(cid("dup"), {f.id["a"], f.id["a"]}), Errc::InvalidArgument);
}

TEST_CASE("history figure: merge base and fast-forward") {
  Fixture f = dag_figure();
  CHECK(f.dag.lca_candidates(f.id["2.3"], f.id["3.3"]) == f.ids({"2.2"}));
  CHECK(f.dag.ff_status(f.id["1.2"], f.id["2.4"]) == FfStatus::FastForward);
  CHECK(f.dag.ff_status(f.id["2.4"], f.id["1.2"]) == FfStatus::AlreadyUpToDate);
  CHECK(f.dag.ff_status(f.id["2.4"], f.id["2.4"]) == FfStatus::AlreadyUpToDate);
  CHECK(f.dag.ff_status(f.id["2.3"], f.id["3.3"]) == FfStatus::NeedsMerge);
  // after the recorded merge 1.2, later queries use it rather than 2.2's ancestors
  CHECK(f.dag.lca_candidates(f.id["1.2"], f.id["2.3"]) == f.ids({"1.2"}));
}

TEST_CASE("criss-cross has two merge base candidates") {
  Fixture f = criss_cross();
  CHECK(f.dag.lca_candidates(f.id["X1"], f.id["Y1"]) == f.ids({"X0", "Y0"}));
  CHECK(f.dag.lca_candidates(f.id["Y1"], f.id["X1"]) == f.ids({"X0", "Y0"}));
}

TEST_CASE("unrelated histories have no merge base") {
  Fixture f;
  f.add("a", {});
  f.add("b", {});
  CHECK_ERRC(f.dag.lca_candidates(f.id["a"], f.id["b"]), Errc::EmptyResult);
}

TEST_CASE("random DAGs agree with transitive closure and brute-force LCA") {
  Rng rng(31);
  for (int round = 0; round < 40; ++round) {
    RandomDag r = random_dag(rng, 2 + rng() % 59);
    auto reach = closure(r);
    std::size_t n = r.nodes.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) REQUIRE(r.dag.is_ancestor(r.nodes[i], r.nodes[j]) == reach[i][j]);

    for (int q = 0; q < 30; ++q) {
      std::size_t x = rng() % n;
      std::size_t y = rng() % n;
      std::vector<ObjectId> expected;
      for (std::size_t c = 0; c < n; ++c) {
        if (!reach[c][x] || !reach[c][y]) continue;
        bool maximal = true;
        for (std::size_t d = 0; d < n; ++d)
          if (d != c && reach[d][x] && reach[d][y] && reach[c][d]) maximal = false;
        if (maximal) expected.push_back(r.nodes[c]);
      }
      std::sort(expected.begin(), expected.end());
      if (expected.empty()) {
        CHECK_ERRC(r.dag.lca_candidates(r.nodes[x], r.nodes[y]), Errc::EmptyResult);
        continue;
      }
      auto got = r.dag.lca_candidates(r.nodes[x], r.nodes[y]);
      CHECK(got == expected);
      CHECK(r.dag.lca_candidates(r.nodes[y], r.nodes[x]) == got);
      for (const auto& a : got)
        for (const auto& b : got)
          if (a != b) CHECK_FALSE(r.dag.is_ancestor(a, b));

      int statuses = 0;
      auto s = r.dag.ff_status(r.nodes[x], r.nodes[y]);
      statuses += s == FfStatus::AlreadyUpToDate ? 1 : 0;
      statuses += s == FfStatus::FastForward ? 1 : 0;
      statuses += s == FfStatus::NeedsMerge ? 1 : 0;
      CHECK(statuses == 1);
      CHECK((s == FfStatus::AlreadyUpToDate) == reach[y][x]);
      CHECK((s == FfStatus::FastForward) == (reach[x][y] && x != y));
    }

    // toposort: a valid linear extension of the reachable subgraph
    std::vector<ObjectId> heads{r.nodes.back(), r.nodes[rng() % n]};
    auto order = r.dag.toposort(heads);
    std::map<ObjectId, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    std::size_t expected_count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][n - 1] || r.dag.is_ancestor(r.nodes[i], heads[1])) ++expected_count;
    CHECK(order.size() == expected_count);
    for (const auto& [id, k] : pos)
      for (const auto& p : r.dag.parents(id)) CHECK(pos.at(p) > k);
  }
}

TEST_CASE("toposort is newest-first with id tie-break") {
  Fixture f;
  f.add("a", {}, 10);
  f.add("b", {"a"}, 20);
  f.add("c", {"b"}, 30);
  std::vector<ObjectId> heads{f.id["c"]};
  CHECK(f.dag.toposort(heads) == std::vector<ObjectId>{f.id["c"], f.id["b"], f.id["a"]});

  f.add("x", {"a"}, 25);
  f.add("m", {"c", "x"}, 40);
  std::vector<ObjectId> mheads{f.id["m"]};
  auto order = f.dag.toposort(mheads);
  CHECK(order == std::vector<ObjectId>{f.id["m"], f.id["c"], f.id["x"], f.id["b"], f.id["a"]});

  Fixture t;
  t.add("r", {}, 1);
  t.add("p", {"r"}, 5);
  t.add("q", {"r"}, 5);
  std::vector<ObjectId> both{t.id["p"], t.id["q"]};
  auto tie = t.dag.toposort(both);
  CHECK(tie[0] == std::min(t.id["p"], t.id["q"]));
}

TEST_CASE("ref store round trip") {
  TempDir dir;
  RefStore refs(dir / "refs");
  CHECK_FALSE(refs.get("main").has_value());
  CHECK_ERRC(refs.resolve("main"), Errc::UnknownRef);
  refs.set("main", cid("a"));
  refs.set("remote/main", cid("b"));
  CHECK(refs.resolve("main") == cid("a"));
  CHECK(vcs::read_file(dir / "refs" / "main") == cid("a").hex() + "\n");
  auto all = refs.list();
  REQUIRE(all.size() == 2);
  CHECK(all.begin()->first == "main");
  CHECK(all.at("remote/main") == cid("b"));
  refs.remove("main");
  CHECK_FALSE(refs.exists("main"));
  for (const char* bad : {"", "/x", "x/", "a//b", "..", "a/../b", "has space", "x.lock", "a:b"})
    CHECK_FALSE(RefStore::valid_name(bad));
  CHECK_ERRC(refs.set("bad name", cid("a")), Errc::InvalidArgument);
}
