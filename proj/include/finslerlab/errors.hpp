#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Exception hierarchy for the whole library. Each type names the contract
// it guards; messages carry the offending values.

struct DegenerateGradient : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotUniformlyElliptic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NegativeArgument : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WrongSpecialization : std::logic_error {
    using std::logic_error::logic_error;
};

struct TraceNotZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SupercriticalDimensionPair : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotCoercive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LineSearchFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxIterations : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SupportEscapesGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace finsler
