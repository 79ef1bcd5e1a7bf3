#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lfd {

enum class ErrorKind {
    InvalidGrid,
    InvalidArgument,
    NoEquilibrium,
    NonConvergence,
    BallTooLarge,
    PauliViolation,
    StepTooLarge,
    BlowUp,
    ProjectionInfeasible,
    GramSingular,
    NoConvergence,
    EpsilonOutOfRange,
    MassMismatch,
    DegenerateFit,
    NotRadial,
    ConfigError,
    IoError
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoEquilibrium: return "NoEquilibrium";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BallTooLarge: return "BallTooLarge";
    case ErrorKind::PauliViolation: return "PauliViolation";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::ProjectionInfeasible: return "ProjectionInfeasible";
    case ErrorKind::GramSingular: return "GramSingular";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::NotRadial: return "NotRadial";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace lfd
