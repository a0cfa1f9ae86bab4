#pragma once

/* ASCII history graph: one line per commit, lanes in a left margin.

     *   a1b2c3d Merge topic into main (alice)
     |\
     | * 4e5f6a7 topic work (bob)
     * | 8b9c0d1 main work (alice)
     |/
     * 2e3f4a5 initial (alice)
*/

#include <string>
#include <vector>

#include "vcs/object.hpp"

namespace vcs {

struct LogEntry {
  ObjectId id;
  std::vector<ObjectId> parents;
  std::string subject;
  std::string author;
};

// `entries` must list children before parents.
std::vector<std::string> render_graph(const std::vector<LogEntry>& entries);

}  // namespace vcs
