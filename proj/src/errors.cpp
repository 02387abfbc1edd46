#include "diracgap/errors.hpp"

namespace diracgap {

const char* error_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidChannel: return "InvalidChannel";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::SingularGram: return "SingularGram";
        case ErrorKind::InvalidPotential: return "InvalidPotential";
        case ErrorKind::DenominatorSignError: return "DenominatorSignError";
        case ErrorKind::NoEigenvalueInGap: return "NoEigenvalueInGap";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::NegativeBlockNotDefinite: return "NegativeBlockNotDefinite";
        case ErrorKind::OutOfCoreBranch: return "OutOfCoreBranch";
        case ErrorKind::Config: return "ConfigError";
    }
    return "Error";
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::NoEigenvalueInGap: return 2;
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::QuadratureFailure:
        case ErrorKind::SingularGram:
        case ErrorKind::NegativeBlockNotDefinite: return 3;
        default: return 1;
    }
}

}  // namespace diracgap
