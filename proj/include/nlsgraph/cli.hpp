#pragma once

#include <string>

namespace nlsg {

/// Scientific notation with 17 significant digits (round-trip exact doubles).
std::string csv_number(double x);

/// Entry point of the nlsgraph tool. Exit codes: 0 success, 2 config error,
/// 3 blow-up signal, 4 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace nlsg
