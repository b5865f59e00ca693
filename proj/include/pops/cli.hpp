#pragma once

#include <ostream>

namespace pops {

/// Entry point of the `pops` executable. Exit status 0 on success, 1 on a
/// user or data error, 2 on an internal failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pops
