#include "builder.hpp"
#include "vcs/error.hpp"

namespace vcs {

int generation_count(const WeaveLine& line, const std::vector<bool>& mask) {
  if (!mask.at(line.insert_rev)) return 0;
  for (RevIndex d : line.delete_revs)
    if (mask.at(d)) return 2;
  return 1;
}

MergeResult pcdv_merge(const Weave& weave, std::string_view x, std::string_view y, const MergeLabels& labels) {
  auto mask_x = weave.ancestry_mask(weave.index_of(x));
  auto mask_y = weave.ancestry_mask(weave.index_of(y));
  detail::MergeBuilder out(labels);

  Lines lx, ly;
  bool px = false, py = false;
  auto flush = [&] {
    if (px && py) {
      out.conflict(lx, ly);
    } else if (px) {
      out.take(lx);
    } else if (py) {
      out.take(ly);
    }
    lx.clear();
    ly.clear();
    px = py = false;
  };

  for (const auto& line : weave.lines()) {
    int vx = generation_count(line, mask_x);
    int vy = generation_count(line, mask_y);
    bool in_x = vx == 1;
    bool in_y = vy == 1;
    if (!in_x && !in_y) continue;
    if (in_x && in_y) {
      flush();
      out.take(line.text);
      continue;
    }
    (in_x ? lx : ly).push_back(line.text);
    if (vx > vy) px = true;
    if (vy > vx) py = true;
  }
  flush();
  return out.finish();
}

}  // namespace vcs
