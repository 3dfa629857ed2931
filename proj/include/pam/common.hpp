#ifndef PAM_COMMON_HPP
#define PAM_COMMON_HPP

#include <stdexcept>
#include <string>

namespace pam {

// Numerical failure distinct from contract violations: a quadrature or
// series that did not converge must never be reported as a value.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace pam

#endif
