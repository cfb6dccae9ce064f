#ifndef DISTCELL_ERRORS_HPP
#define DISTCELL_ERRORS_HPP

#include <stdexcept>

namespace distcell {

// Exit codes used by the CLI.
enum ExitCode {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfigError = 2,
    kExitMissingInput = 3,
    kExitIoError = 4,
    kExitEmptyResult = 5,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace distcell

#endif
