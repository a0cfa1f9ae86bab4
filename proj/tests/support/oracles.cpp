#include <algorithm>
#include <atomic>

#include <unistd.h>

#include "support/oracles.hpp"
#include "vcs/bytes.hpp"

namespace vcs::test {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("vcs-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Lines random_lines(Rng& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  Lines lines(len_dist(rng));
  for (auto& line : lines) line = std::string(1, static_cast<char>('a' + sym(rng))) + "\n";
  return lines;
}

std::string random_bytes(Rng& rng, std::size_t len) {
  std::string out(len, '\0');
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& c : out) c = static_cast<char>(byte(rng));
  return out;
}

std::string mutate_bytes(Rng& rng, const std::string& base, int edits) {
  std::string out = base;
  for (int e = 0; e < edits; ++e) {
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, out.size())(rng);
    std::size_t len = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0:
        out.insert(pos, random_bytes(rng, len));
        break;
      case 1:
        out.erase(pos, len);
        break;
      case 2:
        out.replace(pos, std::min(len, out.size() - pos), random_bytes(rng, len));
        break;
      default: {
        std::size_t from = std::uniform_int_distribution<std::size_t>(0, out.size())(rng);
        std::string block = out.substr(from, len);
        out.insert(pos, block);
        break;
      }
    }
  }
  return out;
}

Lines mutate_lines(Rng& rng, const Lines& base, int edits, const std::string& tag) {
  Lines out = base;
  static std::atomic<int> serial{0};
  for (int e = 0; e < edits; ++e) {
    int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, out.size())(rng);
    std::string fresh = tag + "-" + std::to_string(serial++) + "\n";
    if (kind == 0 || out.empty()) {
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), fresh);
    } else {
      pos = std::min(pos, out.size() - 1);
      if (kind == 1) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
      } else {
        out[pos] = fresh;
      }
    }
  }
  return out;
}

std::vector<HistoryRev> random_history(Rng& rng, std::size_t revisions, bool merges) {
  std::vector<HistoryRev> out;
  for (std::size_t r = 0; r < revisions; ++r) {
    HistoryRev rev;
    rev.id = "r" + std::to_string(r);
    if (r == 0) {
      rev.content = random_lines(rng, 12, 6);
    } else {
      std::size_t p = std::uniform_int_distribution<std::size_t>(0, r - 1)(rng);
      rev.parents.push_back(out[p].id);
      if (merges && r >= 2 && rng() % 4 == 0) {
        std::size_t q = std::uniform_int_distribution<std::size_t>(0, r - 1)(rng);
        if (q != p) rev.parents.push_back(out[q].id);
      }
      const Lines& from = out[p].content;
      rev.content = rng() % 8 == 0 ? from
                                   : mutate_lines(rng, from, 1 + static_cast<int>(rng() % 4), rev.id);
      // occasionally reuse old text so lines recur across branches
      if (rng() % 5 == 0 && !from.empty()) rev.content.push_back(from[rng() % from.size()]);
    }
    for (std::size_t k = 0; k + 1 < rev.content.size(); ++k)
      if (rev.content[k].back() != '\n') rev.content[k].push_back('\n');
    if (!rev.content.empty() && rng() % 6 == 0 && rev.content.back().size() > 1) rev.content.back().pop_back();
    out.push_back(std::move(rev));
  }
  return out;
}

SyntheticRepo synthetic_repo(Rng& rng, std::size_t min_objects) {
  SyntheticRepo repo;
  auto put = [&](ObjectKind kind, std::string payload) {
    ObjectId id = hash_object(kind, payload);
    repo.objects.emplace(id, StoredObject{kind, std::move(payload)});
    return id;
  };
  const std::vector<std::string> paths{"README", "src/main.c", "src/util.c", "include/util.h", "docs/guide.txt"};
  std::map<std::string, Lines> files;
  for (const auto& p : paths) {
    for (int i = 0; i < 40; ++i) files[p].push_back(p + " line " + std::to_string(i) + " " + std::to_string(rng() % 1000) + "\n");
  }
  auto snapshot = [&](const std::map<std::string, Lines>& state) {
    std::map<std::string, std::vector<TreeEntry>> dirs;
    for (const auto& [path, lines] : state) {
      auto slash = path.find('/');
      std::string dir = slash == std::string::npos ? "" : path.substr(0, slash);
      std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
      dirs[dir].push_back({name, FileMode::Normal, put(ObjectKind::Blob, join_lines(lines)), ObjectKind::Blob});
    }
    std::vector<TreeEntry> root = dirs[""];
    for (const auto& [dir, entries] : dirs) {
      if (dir.empty()) continue;
      root.push_back({dir, FileMode::Normal, put(ObjectKind::Tree, serialize_tree(make_tree(entries))), ObjectKind::Tree});
    }
    return put(ObjectKind::Tree, serialize_tree(make_tree(root)));
  };

  std::optional<ObjectId> main_head;
  std::optional<ObjectId> side_head;
  std::map<std::string, Lines> side_files;
  std::int64_t clock = 1600000000;
  for (int n = 0; repo.objects.size() < min_objects; ++n) {
    bool on_side = side_head && rng() % 3 == 0;
    auto& state = on_side ? side_files : files;
    int edits = 1 + static_cast<int>(rng() % 2);
    for (int e = 0; e < edits; ++e) {
      const auto& path = paths[rng() % paths.size()];
      state[path] = mutate_lines(rng, state[path], 1 + static_cast<int>(rng() % 3), "c" + std::to_string(n));
    }
    Commit c;
    c.tree = snapshot(state);
    auto& head = on_side ? side_head : main_head;
    if (head) c.parents.push_back(*head);
    c.author = "Synthetic <synthetic@example.org>";
    c.timestamp = clock += 60;
    c.message = "change " + std::to_string(n) + "\n";
    head = put(ObjectKind::Commit, serialize_commit(c));
    if (n == 5) {
      side_head = main_head;
      side_files = files;
    }
  }
  repo.heads.push_back(*main_head);
  if (side_head && *side_head != *main_head) repo.heads.push_back(*side_head);
  return repo;
}

std::size_t lcs_length_dp(const Lines& a, const Lines& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

SubstringOracle longest_common_substring_bruteforce(const Lines& a, const Lines& b) {
  SubstringOracle best;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = 0;
      while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
      if (k > best.length) best = {i, j, k};
    }
  }
  return best;
}

std::vector<std::size_t> lis_quadratic(const std::vector<std::size_t>& seq) {
  if (seq.empty()) return {};
  std::vector<std::size_t> len(seq.size(), 1);
  std::vector<std::ptrdiff_t> prev(seq.size(), -1);
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (seq[j] < seq[i] && len[j] + 1 > len[i]) {
        len[i] = len[j] + 1;
        prev[i] = static_cast<std::ptrdiff_t>(j);
      }
  auto best = static_cast<std::ptrdiff_t>(std::max_element(len.begin(), len.end()) - len.begin());
  std::vector<std::size_t> out;
  for (auto i = best; i >= 0; i = prev[static_cast<std::size_t>(i)])
    out.push_back(static_cast<std::size_t>(i));
  std::reverse(out.begin(), out.end());
  return out;
}

std::string read_golden(const std::string& name) {
  return read_file(fs::path(VCS_GOLDEN_DIR) / name);
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i)
    if (haystack.compare(i, needle.size(), needle) == 0) {
      ++count;
      i += needle.size() - 1;
    }
  return count;
}

}  // namespace vcs::test
