#pragma once

#include <stdexcept>
#include <string>

namespace guild {

/// Raised when a local-subset union has zero measure in both members.
/// Callers fall back to Informed Set sampling.
class DegenerateSubsetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling gave up before producing an accepted state.
class SamplingStarvedError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class EnvironmentTooClutteredError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ReferenceUnavailableError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value failed validation. `field()` names the offending key.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::runtime_error(field + ": " + what), field_(std::move(field))
    {
    }

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace guild
