#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modlink::cli {

/// Entry point for the `modlink` command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modlink::cli
