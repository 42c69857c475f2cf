#pragma once

#include <stdexcept>
#include <string>

namespace ao {

// Error idioms shared across the library. All are runtime_errors so callers
// can catch the base class; precision-escalation loops catch the specific
// types they know how to retry.

struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct SingularLocus : std::runtime_error {
    explicit SingularLocus(const std::string& what) : std::runtime_error(what) {}
};

struct SingularityApproached : std::runtime_error {
    explicit SingularityApproached(const std::string& what) : std::runtime_error(what) {}
};

struct NotADiscriminant : std::runtime_error {
    explicit NotADiscriminant(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfDomain : std::runtime_error {
    explicit OutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

struct SizeCapExceeded : std::runtime_error {
    explicit SizeCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroPolynomial : std::runtime_error {
    explicit ZeroPolynomial(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroLeadingCoefficient : std::runtime_error {
    explicit ZeroLeadingCoefficient(const std::string& what) : std::runtime_error(what) {}
};

struct NonIntegerSectionPoint : std::runtime_error {
    explicit NonIntegerSectionPoint(const std::string& what) : std::runtime_error(what) {}
};

struct NotDnd : std::runtime_error {
    explicit NotDnd(const std::string& what) : std::runtime_error(what) {}
};

struct NotHdnd : std::runtime_error {
    explicit NotHdnd(const std::string& what) : std::runtime_error(what) {}
};

struct CertificateNotFound : std::runtime_error {
    explicit CertificateNotFound(const std::string& what) : std::runtime_error(what) {}
};

// Parse errors carry the byte offset of the offending token.
struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& what, size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

} // namespace ao
