#pragma once

#include <stdexcept>
#include <string>

namespace szb {

// Base of every error raised by the library. Numerical failures (budget,
// convergence, overflow) map to CLI exit code 3; configuration and input
// problems map to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class TermBudgetExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureNoConverge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The Beta-prime moment of the requested order is infinite for this n.
class MomentDiverges : public DomainError {
public:
    using DomainError::DomainError;
};

// The function grows too fast for the kernel integral to exist at this n.
class GrowthTooLarge : public DomainError {
public:
    using DomainError::DomainError;
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class MalformedTable : public ConfigInvalid {
public:
    using ConfigInvalid::ConfigInvalid;
};

class NonMonotoneAbscissae : public MalformedTable {
public:
    using MalformedTable::MalformedTable;
};

} // namespace szb
