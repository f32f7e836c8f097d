#pragma once

namespace seizdet::cli {

/// Full command-line frontend. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numeric failure.
int run(int argc, char** argv);

}  // namespace seizdet::cli
