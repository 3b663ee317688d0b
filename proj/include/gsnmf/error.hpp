#ifndef GSNMF_ERROR_HPP
#define GSNMF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gsnmf {

/// Category of a library failure. Each maps onto one C status code and one
/// CLI exit code.
enum class ErrorKind {
    parameter,   ///< invalid configuration value
    domain,      ///< input outside the mathematical domain (zero norm, zero row, ...)
    parse,       ///< malformed input file
    numeric,     ///< solver breakdown (NaN, singular system, eigensolver failure)
    clustering,  ///< degenerate spectral clustering outcome
    io           ///< file system failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct ClusteringError : Error {
    explicit ClusteringError(const std::string& what) : Error(ErrorKind::clustering, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace gsnmf

#endif
