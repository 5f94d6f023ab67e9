#ifndef TREEALIGN_CLI_HPP
#define TREEALIGN_CLI_HPP

#include <iosfwd>

namespace treealign::cli {

// Exit codes: 0 success, 1 data or validation error, 2 usage error.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treealign::cli

#endif  // TREEALIGN_CLI_HPP
