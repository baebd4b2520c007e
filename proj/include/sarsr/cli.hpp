#pragma once

#include <iosfwd>

namespace sarsr {

/// Entry point of the `sarsr` tool. Returns 0 on success, 1 on a processing
/// error (reported with its stage) and 2 on a usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sarsr
