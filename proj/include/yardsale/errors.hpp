#pragma once

#include <stdexcept>
#include <string>

namespace yardsale {

/// A parameter lies outside the domain of the model (δ, χ, λ, fraction law, N).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A wealth vector that cannot become (or is no longer) a valid state.
class InvalidState : public std::invalid_argument {
public:
    enum class Reason { empty, negative_entry, zero_total, non_finite, unnormalized };

    InvalidState(Reason reason, const std::string& what)
        : std::invalid_argument(what), reason_(reason) {}

    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// Reading or writing a file failed; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace yardsale
