#ifndef CHIPLETPLACE_CLI_HPP
#define CHIPLETPLACE_CLI_HPP

// Command-line driver. Subcommands: run, eval, route, compare.
// Exit codes: 0 success, 1 usage, 2 validation, 3 solver failure.

namespace chiplet {

int cli_main(int argc, const char* const* argv);

} // namespace chiplet

#endif
