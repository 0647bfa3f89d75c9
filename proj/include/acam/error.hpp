#pragma once

#include <stdexcept>
#include <string>

namespace acam {

enum class error_kind {
    parse,
    domain,
    convergence,
    inconsistent,
    ambiguous,
    invalid_argument,
};

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

inline error domain_error(const std::string& what) { return error(error_kind::domain, what); }
inline error parse_error(const std::string& what) { return error(error_kind::parse, what); }

/// Programming loop gave up; carries the closest conductance reached.
class programming_error : public error {
public:
    programming_error(const std::string& what, double best_g, int iters)
        : error(error_kind::convergence, what), best_g(best_g), iterations(iters) {}
    double best_g;
    int iterations;
};

} // namespace acam
