#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ibd {

/// Exit codes: 0 success, 1 usage or validation error, 2 numeric failure.
/// Subcommands: simulate, stationary, gibbs, balance-check, spectrum,
/// classify, exp-diffusion, exp-fluid, gen-check, diffusion-law,
/// diffusion-path, fluid-path. Each prints one summary line
/// "<subcommand> ok key=value ..." to `out` and writes CSV under --out.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ibd
