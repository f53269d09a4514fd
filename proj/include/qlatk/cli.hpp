#ifndef QLATK_CLI_HPP
#define QLATK_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace qlatk {

// Runs one CLI invocation. Exit code 0 = computed/decided, 2 = the cell is
// undecidable/open (structured refusal on stdout), 1 = usage or input error
// (message on stderr).
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qlatk

#endif
