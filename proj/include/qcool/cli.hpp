#pragma once

#include <string>
#include <vector>

namespace qcool {

/// Command-line front end. Returns 0 on success, 1 on validation errors,
/// 2 when a --check run finds a failed consistency check.
int cli_main(std::vector<std::string> args);

}  // namespace qcool
