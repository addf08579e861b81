#pragma once

namespace lumisep {

/// Exit codes: 0 success, 2 input errors, 3 estimation failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitEstimation = 3;

int cli_main(int argc, char** argv);

}  // namespace lumisep
