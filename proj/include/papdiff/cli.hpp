#pragma once

#include <string>
#include <vector>

namespace papdiff {

// Entry point behind the papdiff binary; args excludes argv[0].
// Exit codes: 0 success, 1 check failure, 2 usage error.
int cli_run(const std::vector<std::string>& args);

}  // namespace papdiff
