#pragma once

namespace dagpath::cli {

// Entry point of the `dagpath` executable. Subcommands: learn, params,
// select, cov, prec, simulate, export. Returns 0 on success, 1 on usage
// errors, 2 on bad input data or files. Diagnostics go to stderr.
int run(int argc, char** argv);

}  // namespace dagpath::cli
