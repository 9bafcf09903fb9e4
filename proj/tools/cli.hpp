#pragma once

#include <ostream>

namespace helm {

/// Entry point of helm-bench. Returns 0 on success, 1 on usage or
/// validation errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace helm
