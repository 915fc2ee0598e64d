#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynq::cli {

/// Process exit statuses. `check_failed` covers a failed `--require` and OuMv mismatches.
enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_parse_error = 2,
    exit_budget = 3,
    exit_unsupported = 4,
    exit_rejected = 5,
};

/** Runs one invocation. `args` excludes the program name. `in` backs `run` when no `--stream` file is given.
 * Results go to `out`; diagnostics, warnings and usage errors go to `err`. */
int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err);

}
