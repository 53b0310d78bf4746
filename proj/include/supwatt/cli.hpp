#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace supwatt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;

// `args` excludes the program name. Diagnostics go to `err`; results that are
// not redirected with --out go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

// "a:b:step" -> {a, a+step, ..., <= b}
std::vector<std::size_t> parse_range(const std::string& text);

} // namespace supwatt::cli
