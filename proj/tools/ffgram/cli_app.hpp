#ifndef FFGRAM_CLI_APP_HPP
#define FFGRAM_CLI_APP_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ffgram::cli {

// Runs one batch invocation. args excludes the program name. Reports go to
// out (or the file named by --output); progress and errors go to err.
// Returns 0 when everything computed and held, 1 when a theorem battery
// failed mathematically, 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ffgram::cli

#endif
