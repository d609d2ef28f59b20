#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hullforge {

// Base class for every error the library raises. kind() is a stable
// machine-readable tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// One out-of-range entry in a parameter vector.
struct RangeViolation {
    std::string field;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Raised by parameter validation; carries every violation found, not
// just the first.
class ValidationError : public Error {
public:
    ValidationError(std::vector<RangeViolation> violations, const std::string& message)
        : Error("RangeViolation", message), violations_(std::move(violations)) {}

    const std::vector<RangeViolation>& violations() const noexcept { return violations_; }

private:
    std::vector<RangeViolation> violations_;
};

class ArityError : public Error {
public:
    explicit ArityError(const std::string& m) : Error("ArityError", m) {}
};

class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& m) : Error("NonFiniteError", m) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& m) : Error("DomainError", m) {}
};

class DraftError : public Error {
public:
    explicit DraftError(const std::string& m) : Error("DraftError", m) {}
};

class MeshError : public Error {
public:
    explicit MeshError(const std::string& m) : Error("MeshError", m) {}
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& m, double achieved)
        : Error("QuadratureError", m), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

class ReynoldsError : public Error {
public:
    explicit ReynoldsError(const std::string& m) : Error("ReynoldsError", m) {}
};

class ExtrapolationError : public Error {
public:
    explicit ExtrapolationError(const std::string& m) : Error("ExtrapolationError", m) {}
};

class EmptyDataError : public Error {
public:
    explicit EmptyDataError(const std::string& m) : Error("EmptyDataError", m) {}
};

class KRangeError : public Error {
public:
    explicit KRangeError(const std::string& m) : Error("KRangeError", m) {}
};

class SingleClusterError : public Error {
public:
    explicit SingleClusterError(const std::string& m) : Error("SingleClusterError", m) {}
};

class DegenerateComponentError : public Error {
public:
    explicit DegenerateComponentError(const std::string& m)
        : Error("DegenerateComponentError", m) {}
};

class PerplexityError : public Error {
public:
    explicit PerplexityError(const std::string& m) : Error("PerplexityError", m) {}
};

class HeaderMismatch : public Error {
public:
    explicit HeaderMismatch(const std::string& m) : Error("HeaderMismatch", m) {}
};

class EmptyFile : public Error {
public:
    explicit EmptyFile(const std::string& m) : Error("EmptyFile", m) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& m) : Error("ParseError", m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error("IoError", m) {}
};

} // namespace hullforge
