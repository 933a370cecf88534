#pragma once

#include <string>
#include <vector>

namespace pcag {

/// Runs one CLI invocation: subcommands tree | cov | basis | pim | score |
/// xval | loads | synth, each driven by a key-value config file with
/// flag overrides. Returns 0 on success, 1 on validation errors, 2 on runtime
/// errors.
int cli_dispatch(const std::vector<std::string>& args);

int cli_dispatch(int argc, const char* const* argv);

}  // namespace pcag
