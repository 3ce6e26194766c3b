#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lookupf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. JSON results go to `out`, human-readable
// messages and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace lookupf::cli
