// commands.hpp - spindeco command-line entry point
#pragma once

namespace spindeco::cli {

// Exit codes: 0 success, 1 invalid input or failed computation, 2 usage error.
int run(int argc, char** argv);

}  // namespace spindeco::cli
