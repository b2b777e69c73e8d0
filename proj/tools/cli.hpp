#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coalcert::cli {

enum exit_code : int
{
    ok = 0,
    parse_failure = 1,
    config_failure = 2,
    certificate_failure = 3,
};

// Runs the command line tool on args (without the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace coalcert::cli
