#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

// Bad input: malformed documents, out-of-range ids, invalid parameters.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class MalformedDocument : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class VertexOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class SelfLoop : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class DuplicateEdge : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Adoption function values outside [0,1] beyond clamping slack.
class DynamicsError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Dynamics lacking the hypotheses a coupling needs.
class HypothesisError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Enumeration or state-space budget exhausted.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace contagion
