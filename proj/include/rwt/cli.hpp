#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace rwt {

inline constexpr std::string_view kVersion = "0.1.0";

// Runs one command line (without the program name). Returns the exit status:
// 0 ok, 1 runtime error, 2 usage error. Errors are written to `err` as one
// JSON record {"error": <code>, "message": ...}.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rwt
