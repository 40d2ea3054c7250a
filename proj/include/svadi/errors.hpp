#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svadi {

/// Invalid model parameters, grid bounds or run configuration. The message
/// names the offending field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Coefficient evaluation outside the non-degenerate region (y <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A line matrix whose pivot fell below the floor during factorization.
class SingularLineError : public std::runtime_error {
public:
    SingularLineError(const std::string& what, std::size_t line, double coordinate)
        : std::runtime_error(what), line_(line), coordinate_(coordinate) {}

    std::size_t line() const noexcept { return line_; }
    double coordinate() const noexcept { return coordinate_; }

private:
    std::size_t line_;
    double coordinate_;
};

/// Non-finite value produced by a time step.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& stage, std::size_t step, std::size_t i, std::size_t j)
        : std::runtime_error("non-finite value in stage " + stage + " of step " +
                             std::to_string(step) + " at node (" + std::to_string(i) + "," +
                             std::to_string(j) + ")"),
          stage_(stage), step_(step), i_(i), j_(j) {}

    const std::string& stage() const noexcept { return stage_; }
    std::size_t step() const noexcept { return step_; }
    std::size_t i() const noexcept { return i_; }
    std::size_t j() const noexcept { return j_; }

private:
    std::string stage_;
    std::size_t step_, i_, j_;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace svadi
