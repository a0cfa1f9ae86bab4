#pragma once

// The `vcs` command line. Exit codes: 0 success, 1 conflict or divergence,
// 2 usage and other errors, 3 corruption.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "vcs/error.hpp"

namespace vcs {

int exit_code_for(Errc code);

// `args` excludes the program name; relative paths resolve against `cwd`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::filesystem::path& cwd);

}  // namespace vcs
