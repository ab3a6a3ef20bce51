#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gossipdet {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied parameters or data. The CLI maps this to exit code 1.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The graph has no edges, so the interaction process is undefined.
class NoEdgesError : public InvalidInput {
public:
    NoEdgesError() : InvalidInput("graph has no edges: interaction dynamics are undefined") {}
};

/// A requested step is not covered by the recorded trajectory.
class InsufficientData : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Caller broke an API precondition (mismatched dimensions, foreign edge, ...).
class ContractViolation : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// I/O failure while reading or writing artifact files.
class IoError : public Error {
public:
    using Error::Error;
};

/// The steady-state system is singular because some regular agents are not
/// reachable from any stubborn influence. Agent ids are 1-based.
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, std::vector<int> unreachable_agents)
        : Error(what), unreachable_(std::move(unreachable_agents)) {}

    const std::vector<int>& unreachable_agents() const noexcept { return unreachable_; }

private:
    std::vector<int> unreachable_;
};

}  // namespace gossipdet
