#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace folforge::cli {

/// Runs one `folforge` invocation; args[0] is the program name.
/// Returns 0 on success, 1 when any Error-severity outcome was reported,
/// 2 on usage or configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace folforge::cli
