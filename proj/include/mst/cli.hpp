#pragma once

#include <iosfwd>

namespace mst::cli {

enum ExitCode : int {
  kOk = 0,
  kDataError = 1,       // malformed or non-finite input, other runtime failures
  kUsage = 2,           // bad flags or config values
  kChannelMismatch = 3, // content and style channel counts differ
  kTooFewPoints = 4,    // K exceeds the number of style feature vectors
  kIoError = 5,         // unreadable or unwritable file
};

/// Entry point of the `mst` tool. Subcommands: transfer, cluster, match,
/// metrics, energy. Reports go to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mst::cli
