#pragma once

#include <stdexcept>
#include <string>

namespace uhlq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// input matrix fails the Hermiticity gate; carries the measured relative asymmetry
struct NonHermitianError : Error {
    NonHermitianError(const std::string& what, double asymmetry_norm)
        : Error(what), asymmetry(asymmetry_norm)
    {
    }
    double asymmetry;
};

// an eigenvalue is zero/negative, or below the rank floor for external inputs
struct FullRankError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// a pipeline invariant failed (WW^dag != rho(t), nonzero dynamic phase, ...)
struct ConsistencyError : Error {
    using Error::Error;
};

// cyclic analysis requested but the scenario has no verified period
struct CyclicityError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// request outside the family the system/ancilla product protocol covers
struct UnsupportedProtocolError : Error {
    using Error::Error;
};

} // namespace uhlq
