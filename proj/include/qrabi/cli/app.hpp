#pragma once

#include <ostream>

namespace qrabi::cli {

// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical error.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

// Whole command line, argv[0] included.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qrabi::cli
