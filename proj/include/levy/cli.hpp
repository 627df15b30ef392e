#pragma once

#include "levy/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace levy {

enum class Command { analyze, estimate, fit };

struct CliOptions {
    int workers = 1;
    bool override_c1 = false;
};

// Exit status: 0 success, 2 conditions required but not met, 1 error.
int run(Command cmd, const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err);

// Full command line: `<tool> analyze|estimate|fit --config <path> [--workers N] [--override-c1]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levy
