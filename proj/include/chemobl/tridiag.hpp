#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemobl {

/// Raised when a time step cannot be completed; carries the simulation time.
class solver_error : public std::runtime_error {
  public:
    solver_error(const std::string& what, double t)
        : std::runtime_error(what + " (t=" + std::to_string(t) + ")"), time(t) {}
    double time;
};

/// Thomas algorithm for a diagonally dominant tridiagonal system.
/// lower[0] and upper[n-1] are ignored. Throws solver_error if a row loses
/// diagonal dominance or a pivot vanishes (signals dt too large / bad assembly).
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs,
                                             double t = 0.0) {
    const size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: band/rhs length mismatch");
    for (size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
        if (!(std::abs(diag[i]) >= off * (1.0 - 1e-12)) || !std::isfinite(diag[i]))
            throw solver_error("tridiagonal system not diagonally dominant", t);
    }
    std::vector<double> cp(n), dp(n);
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (size_t i = 1; i < n; ++i) {
        const double denom = diag[i] - lower[i] * cp[i - 1];
        if (denom == 0.0 || !std::isfinite(denom)) throw solver_error("tridiagonal pivot breakdown", t);
        cp[i] = (i + 1 < n ? upper[i] : 0.0) / denom;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / denom;
    }
    std::vector<double> x(n);
    x[n - 1] = dp[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

}  // namespace chemobl
