#pragma once

namespace hesn {

/// Entry point of the `hier-esn` command line tool. Returns 0 on success,
/// 2 on usage errors and 1 on any other failure.
int cli_dispatch(int argc, const char* const* argv);

} // namespace hesn
