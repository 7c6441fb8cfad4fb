#pragma once

namespace samg::cli {

// Full command-line front end; returns the process exit code.
// 0 success, 1 validation or verification failure, 2 usage or IO error.
int run(int argc, char** argv);

}  // namespace samg::cli
