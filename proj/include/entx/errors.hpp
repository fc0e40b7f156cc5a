#pragma once

#include <stdexcept>
#include <string>

namespace entx {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad argument: invalid index, dimension mismatch, out-of-range parameter.
class argument_error : public error {
public:
    explicit argument_error(const std::string& what) : error(what) {}
};

/// A constructed state or operator violates a structural invariant
/// (hermiticity, trace, positivity, norm).
class validation_error : public error {
public:
    explicit validation_error(const std::string& what) : error(what) {}
};

/// Fock-space truncation retains less weight than requested.
class truncation_error : public error {
public:
    truncation_error(const std::string& what, double achieved, double required)
        : error(what), achieved_weight(achieved), required_weight(required) {}
    double achieved_weight;
    double required_weight;
};

/// An iterative refinement (n_max scan) hit its cap before stabilising.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, int n_max_reached)
        : error(what), n_max_reached(n_max_reached) {}
    int n_max_reached;
};

/// Invalid experiment configuration; carries the offending field name.
class config_error : public error {
public:
    config_error(const std::string& field, const std::string& what)
        : error(field + ": " + what), field(field) {}
    std::string field;
};

}  // namespace entx
