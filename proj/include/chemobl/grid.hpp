#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace chemobl {

/// Uniform 1-D mesh on the annulus [a,b] with the n-dimensional radial
/// measure r^{n-1} dr. Immutable after construction.
struct RadialGrid {
    double inner_radius;  // a
    double outer_radius;  // b
    int dim;              // spatial dimension n >= 2
    int num_nodes;        // N >= 3
    double spacing;       // (b-a)/(N-1)

    RadialGrid(double a, double b, int n, int nodes)
        : inner_radius(a),
          outer_radius(b),
          dim(n),
          num_nodes(nodes),
          spacing((b - a) / static_cast<double>(nodes - 1)) {
        if (!(a > 0.0) || !(b > a))
            throw std::invalid_argument("RadialGrid: need 0 < a < b");
        if (n < 2) throw std::invalid_argument("RadialGrid: dimension n must be >= 2");
        if (nodes < 3) throw std::invalid_argument("RadialGrid: need at least 3 nodes");
        node_weights_.resize(static_cast<size_t>(nodes));
        for (int i = 0; i < nodes; ++i) node_weights_[static_cast<size_t>(i)] = std::pow(node(i), dim - 1);
        face_weights_.resize(static_cast<size_t>(nodes) + 1);
        for (int i = -1; i < nodes; ++i)
            face_weights_[static_cast<size_t>(i + 1)] =
                std::pow(inner_radius + (static_cast<double>(i) + 0.5) * spacing, dim - 1);
    }

    // r_0 = a and r_{N-1} = b hold exactly in floating point.
    double node(int i) const {
        if (i == num_nodes - 1) return outer_radius;
        return inner_radius + static_cast<double>(i) * spacing;
    }

    /// r_i^{n-1}
    double weight(int i) const { return node_weights_[static_cast<size_t>(i)]; }

    /// Weight at the staggered face between nodes i and i+1 (also valid for
    /// the ghost faces i = -1 and i = N-1).
    double face_weight(int i) const { return face_weights_[static_cast<size_t>(i + 1)]; }

    size_t size() const { return static_cast<size_t>(num_nodes); }

  private:
    std::vector<double> node_weights_;
    std::vector<double> face_weights_;
};

namespace detail {
inline void require_length(std::span<const double> v, const RadialGrid& grid, const char* who) {
    if (v.size() != grid.size())
        throw std::invalid_argument(std::string(who) + ": value count does not match grid");
}
}  // namespace detail

/// Trapezoidal approximation of \int_a^b r^{n-1} f(r) dr.
inline double weighted_integral(std::span<const double> values, const RadialGrid& grid) {
    detail::require_length(values, grid, "weighted_integral");
    const int n = grid.num_nodes;
    double sum = 0.5 * grid.weight(0) * values[0];
    for (int i = 1; i < n - 1; ++i) sum += grid.weight(i) * values[static_cast<size_t>(i)];
    sum += 0.5 * grid.weight(n - 1) * values[static_cast<size_t>(n - 1)];
    return sum * grid.spacing;
}

/// Plain trapezoid \int_a^b f dr (weight 1), used by the unweighted norms.
inline double unweighted_integral(std::span<const double> values, const RadialGrid& grid) {
    detail::require_length(values, grid, "unweighted_integral");
    const int n = grid.num_nodes;
    double sum = 0.5 * (values[0] + values[static_cast<size_t>(n - 1)]);
    for (int i = 1; i < n - 1; ++i) sum += values[static_cast<size_t>(i)];
    return sum * grid.spacing;
}

/// Nodal d/dr: central differences inside, second-order one-sided at the walls.
inline std::vector<double> first_derivative(std::span<const double> v, const RadialGrid& grid) {
    detail::require_length(v, grid, "first_derivative");
    const int n = grid.num_nodes;
    const double h = grid.spacing;
    std::vector<double> d(static_cast<size_t>(n));
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i)
        d[static_cast<size_t>(i)] = (v[static_cast<size_t>(i + 1)] - v[static_cast<size_t>(i - 1)]) / (2.0 * h);
    d[static_cast<size_t>(n - 1)] =
        (3.0 * v[static_cast<size_t>(n - 1)] - 4.0 * v[static_cast<size_t>(n - 2)] + v[static_cast<size_t>(n - 3)]) /
        (2.0 * h);
    return d;
}

/// Nodal d2/dr2: 3-point stencil inside, second-order one-sided 4-point at the walls.
inline std::vector<double> second_derivative(std::span<const double> v, const RadialGrid& grid) {
    detail::require_length(v, grid, "second_derivative");
    const int n = grid.num_nodes;
    if (n < 4) throw std::invalid_argument("second_derivative: need at least 4 nodes for wall stencils");
    const double h2 = grid.spacing * grid.spacing;
    std::vector<double> d(static_cast<size_t>(n));
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    for (int i = 1; i < n - 1; ++i)
        d[static_cast<size_t>(i)] =
            (v[static_cast<size_t>(i + 1)] - 2.0 * v[static_cast<size_t>(i)] + v[static_cast<size_t>(i - 1)]) / h2;
    d[static_cast<size_t>(n - 1)] = (2.0 * v[static_cast<size_t>(n - 1)] - 5.0 * v[static_cast<size_t>(n - 2)] +
                                     4.0 * v[static_cast<size_t>(n - 3)] - v[static_cast<size_t>(n - 4)]) /
                                    h2;
    return d;
}

}  // namespace chemobl
