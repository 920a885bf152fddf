#pragma once

#include <stdexcept>
#include <string>

namespace runway {

/// Input outside the mathematical domain of a formula (negative demand, NaN, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter combination hits a removable singularity of a closed form,
/// e.g. eta*(beta+1) == rho in the deterministic model.
class SingularParameterError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A particular-solution denominator (phi(beta+1) or phi(1)) is too close to zero.
class ResonanceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class RootSearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration rejected during validation. `key()` names the offending entry.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace runway
