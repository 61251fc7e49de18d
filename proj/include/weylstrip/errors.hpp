#pragma once

#include <stdexcept>
#include <string>

namespace weylstrip {

// Base of everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- linear algebra kernel ---
struct NotHermitian : Error { using Error::Error; };
struct NegativeEigenvalue : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// --- potentials / propagation ---
struct EvalOutOfRange : Error { using Error::Error; };
struct MissingDerivative : Error { using Error::Error; };
struct OverflowGuard : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };

// --- Moebius / disk machinery ---
struct SingularDenominator : Error { using Error::Error; };
struct NotNegativeDefinite : Error { using Error::Error; };

// --- jets ---
struct OrderUnderflow : Error { using Error::Error; };
struct InsufficientOrder : Error { using Error::Error; };

// --- N-wave ---
struct SingularX2 : Error { using Error::Error; };
struct BadK : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };
struct SingularTrailingBlock : Error {
    explicit SingularTrailingBlock(int k, const std::string& what)
        : Error(what), block(k) {}
    int block;
};

// --- PDE lab ---
struct Instability : Error { using Error::Error; };
struct BadConfig : Error { using Error::Error; };

// --- experiment runner ---
struct ConfigError : Error { using Error::Error; };
struct NumericalFailure : Error {
    NumericalFailure(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage(stage) {}
    std::string stage;
};

}  // namespace weylstrip
