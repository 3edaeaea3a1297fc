#ifndef GRADPOWER_ERRORS_HPP
#define GRADPOWER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gradpower {

/// Invalid argument, parameter outside its space, or malformed input file.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Numerical procedure failed to produce an answer (MLE not bracketed, no
/// convergence, too many failed Monte Carlo replicates).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// MLE could not be computed for a particular sample.
class EstimationError : public NumericError {
public:
    explicit EstimationError(const std::string& what) : NumericError(what) {}
};

} // namespace gradpower

#endif // GRADPOWER_ERRORS_HPP
