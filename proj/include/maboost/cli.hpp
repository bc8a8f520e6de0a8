#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace maboost::cli {

// Exit-code contract for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     ///< bad flags, unreadable or malformed input
inline constexpr int kExitLearner = 2;   ///< no weak learnability
inline constexpr int kExitBound = 3;     ///< a bound check or acceptance criterion failed

/// Runs one CLI invocation; `args` excludes the program name.
///
///   train    --algo A [--geometry G] (--data PATH | --gen SPEC) [--rounds T] ...
///   verify   TRACE
///   project  --geometry G --set SET   (JSON array on stdin)
///   predict  --model PATH (--data PATH | --gen SPEC)
///   bench    [--criterion ID] [--list]
int run(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace maboost::cli
