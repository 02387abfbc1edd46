#pragma once

#include <stdexcept>
#include <string>

namespace diracgap {

enum class ErrorKind {
    InvalidChannel,
    DomainError,
    QuadratureFailure,
    SingularGram,
    InvalidPotential,
    DenominatorSignError,
    NoEigenvalueInGap,
    ConvergenceFailure,
    NegativeBlockNotDefinite,
    OutOfCoreBranch,
    Config,
};

const char* error_name(ErrorKind k);

// Process exit code used by the command line front end.
int exit_code_for(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace diracgap
