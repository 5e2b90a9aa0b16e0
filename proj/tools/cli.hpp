#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atmot {

/// The command line front end.  args excludes the program name.  Returns
/// the exit status: 0 ok, 1 query error or failed check, 2 malformed input,
/// 3 budget exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atmot
