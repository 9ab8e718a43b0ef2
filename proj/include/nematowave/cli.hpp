#pragma once

namespace nematowave {

/// Entry point behind the nematowave executable. Exit codes: 0 completed or
/// verified, 2 blowup detected, 1 configuration or runtime fault.
int run_cli(int argc, char** argv);

}  // namespace nematowave
