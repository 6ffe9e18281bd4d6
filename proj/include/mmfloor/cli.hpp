#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmfloor {

// Full command-line front end, callable in-process for tests. Exit codes of
// the `check` verb: 0 dominating density found, 1 not found (certificate
// printed), 2 arbitrage detected, 3 input error. Other verbs use 0/3.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmfloor
