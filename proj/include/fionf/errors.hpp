#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fionf {

// Base of all library errors.
struct fionf_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input does not satisfy a documented precondition (not symplectic,
// wrong degree, distinctness violated, ...).
struct precondition_error : fionf_error {
    using fionf_error::fionf_error;
};

// Linear part has a negative real eigenvalue: no real logarithm.
struct negative_eigenvalue_error : precondition_error {
    double eigenvalue;
    explicit negative_eigenvalue_error(double ev)
        : precondition_error("negative real eigenvalue " + std::to_string(ev) + ": no real logarithm"), eigenvalue(ev)
    {
    }
};

// Value cannot be represented in the exact field; retry with the float field.
struct not_representable_error : precondition_error {
    using precondition_error::precondition_error;
};

// A small divisor vanished.
struct resonance_error : fionf_error {
    std::vector<int> k;
    int degree = 0;
    std::string value;
    resonance_error(std::vector<int> k_, int degree_, std::string value_, const std::string& what)
        : fionf_error(what), k(std::move(k_)), degree(degree_), value(std::move(value_))
    {
    }
};

// Malformed input document.
struct schema_error : fionf_error {
    using fionf_error::fionf_error;
};

} // namespace fionf
