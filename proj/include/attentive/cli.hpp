#pragma once
#include <string>
#include <vector>

namespace cli {

/// Run the experiment CLI. args excludes the program name. Returns the
/// process exit code: 0 on success, 1 on operational errors (with a JSON
/// error line on stderr), 3 when a verification report contains failing rows.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

} // namespace cli
