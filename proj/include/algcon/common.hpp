#ifndef ALGCON_COMMON_HPP
#define ALGCON_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace algcon {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnknownNodeError : public Error {
public:
    explicit UnknownNodeError(const std::string& node)
        : Error("unknown node '" + node + "'") {}
};

/// Raised when an exact symbolic expansion would exceed the configured
/// dimension cap; callers should fall back to fingerprint-only workflows.
class ExpansionCapError : public Error {
public:
    ExpansionCapError(int dim, int cap)
        : Error("matrix dimension " + std::to_string(dim) + " exceeds expansion cap " +
                std::to_string(cap) + "; use fingerprints instead") {}
};

/// Signalled when an identification system A^(v) is singular at the given
/// covariance matrix.
class IdentificationUndefined : public Error {
public:
    explicit IdentificationUndefined(const std::string& node)
        : Error("identification undefined: A^(" + node + ") is singular"), node_(node) {}
    const std::string& node() const { return node_; }

private:
    std::string node_;
};

/// A constraint whose determinant is identically zero.
class DegenerateConstraintError : public Error {
public:
    explicit DegenerateConstraintError(const std::string& msg) : Error(msg) {}
};

} // namespace algcon

#endif // ALGCON_COMMON_HPP
