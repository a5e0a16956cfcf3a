#pragma once

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace opspace {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (odd p, mismatched spaces, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operator would exceed the configured dimension guard.
class DimensionGuardError : public Error {
public:
    DimensionGuardError(std::size_t required, std::size_t limit, const std::string& what)
        : Error(what + ": required dimension " + std::to_string(required) +
                " exceeds the guard " + std::to_string(limit) +
                " (raise OPSPACE_MAX_DIM to allow it)"),
          required_(required), limit_(limit) {}

    std::size_t required() const noexcept { return required_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t required_;
    std::size_t limit_;
};

/// Power iteration hit its cap; carries the last two Rayleigh iterates.
class ConvergenceError : public Error {
public:
    ConvergenceError(double last, double previous, int iterations)
        : Error("power iteration did not converge after " + std::to_string(iterations) +
                " iterations (last Rayleigh iterates " + std::to_string(previous) + ", " +
                std::to_string(last) + ")"),
          last_(last), previous_(previous) {}

    double last() const noexcept { return last_; }
    double previous() const noexcept { return previous_; }

private:
    double last_;
    double previous_;
};

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 16;

/// Dimension guard in effect: OPSPACE_MAX_DIM when set to a positive integer, else 2^16.
inline std::size_t max_dim() {
    if (const char* env = std::getenv("OPSPACE_MAX_DIM")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultMaxDim;
}

/// Throws DimensionGuardError when `dim` exceeds the guard.
inline void check_dim(std::size_t dim, const std::string& what) {
    const std::size_t limit = max_dim();
    if (dim > limit) throw DimensionGuardError(dim, limit, what);
}

/// Product of dimensions with overflow saturation; feeds check_dim.
inline std::size_t checked_product(std::size_t a, std::size_t b) {
    if (a != 0 && b > static_cast<std::size_t>(-1) / a) return static_cast<std::size_t>(-1);
    return a * b;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

/// Rejects odd or non-positive exponents; the norms are defined for even p only.
inline void require_even(int p, const char* who) {
    if (p < 2 || p % 2 != 0)
        throw DomainError(std::string(who) + ": p must be an even integer >= 2, got " +
                          std::to_string(p));
}

}  // namespace opspace
