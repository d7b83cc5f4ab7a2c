// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace corm {

/// Exit codes: 0 success, 1 runtime error, 2 usage/config error, 3 abstained
/// (infer only, so shell pipelines can branch on the safety decision).
int run_command(const std::vector<std::string>& args);

}  // namespace corm
