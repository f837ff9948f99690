// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string_view>

namespace hosgns {

/// Version string baked in at build time (git describe).
std::string_view version();

/// Entry point of the `hosgns` executable. Returns the process exit code:
/// 0 on success, 1 on runtime errors, 2 on invalid arguments.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hosgns
