#ifndef FLINT_ERROR_HPP
#define FLINT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace flint {

// Exit-code classes shared by the library and the CLI.
enum class Errc {
  usage = 1,      // bad flags / malformed config
  input = 2,      // unreadable or malformed input data
  truncated = 3,  // run hit timeout or path budget
  internal = 4,   // broken invariant
};

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(Errc::usage, msg); }
[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(Errc::input, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { throw Error(Errc::internal, msg); }

}  // namespace flint

#endif
