#pragma once

#include <stdexcept>
#include <string>

namespace riskfloor {

// Input outside the mathematical domain of an operation (negative rhs, alpha
// outside (0,1), non-finite data, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A claimed property of the input is contradicted by the data, e.g. an
// empirical risk larger than the stated loss bound B.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bound was requested outside the parameter range where its validity
// guarantee holds. `admissible` names the range that would be accepted.
class ConditionRefused : public std::runtime_error {
public:
    ConditionRefused(const std::string& what, std::string admissible)
        : std::runtime_error(what), admissible_(std::move(admissible)) {}

    const std::string& admissible() const noexcept { return admissible_; }

private:
    std::string admissible_;
};

// The (generator, model class) pair has no known true risk, so coverage
// cannot be measured.
class UnknownTrueRisk : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riskfloor
