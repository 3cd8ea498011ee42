#pragma once

#include <stdexcept>
#include <vector>

namespace krein {

// Uniform partition t_0 = a < t_1 < ... < t_{N-1} = b shared by every table
// in the library.  Truncation points are always grid nodes, so truncated
// integrals are exact node prefixes and never need interpolation.
struct Grid {
    double a = 0.0;
    double b = 1.0;
    double h = 1.0;
    std::vector<double> nodes;

    int n() const { return static_cast<int>(nodes.size()); }
};

Grid make_grid(double a, double b, int n_nodes);

enum class QuadRule { Trapezoid, Simpson };

// Weights for one node range of a uniform grid.  A single zero weight marks
// a degenerate (empty) integration interval.
struct QuadratureWeights {
    QuadRule rule = QuadRule::Trapezoid;
    std::vector<double> w;
    // Simpson was requested on an even node count and trapezoid was used
    // instead.
    bool fell_back = false;
};

// Weights for integrating over [a, t_j] using nodes t_0..t_j.  j = 0 yields
// the degenerate single zero weight.
QuadratureWeights prefix_weights(const Grid& grid, int j,
                                 QuadRule rule = QuadRule::Trapezoid);

// Weights for integrating over [t_i, b] using nodes t_i..t_{N-1}.
// Trapezoid only; i = N-1 yields the degenerate single zero weight.
QuadratureWeights suffix_weights(const Grid& grid, int i);

// Block-wise linear combination sum_j w_j * samples_j.
template <typename T>
T integrate(const std::vector<T>& samples, const QuadratureWeights& qw) {
    if (samples.size() != qw.w.size())
        throw std::invalid_argument("integrate: sample/weight length mismatch");
    T acc = qw.w[0] * samples[0];
    for (std::size_t j = 1; j < samples.size(); ++j)
        acc += qw.w[j] * samples[j];
    return acc;
}

// Second-order derivative of uniformly spaced samples: central differences
// at interior points, one-sided three-point stencils at both ends.  Exact
// for quadratic data.  Used for every d/dxi in the reconstruction formulas
// and for d/dt in the centered solver.
template <typename T>
std::vector<T> grid_derivative(const std::vector<T>& values, double h) {
    const std::size_t n = values.size();
    if (n < 3)
        throw std::invalid_argument("grid_derivative: need at least 3 samples");
    std::vector<T> out;
    out.reserve(n);
    out.push_back((-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h));
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.push_back((values[i + 1] - values[i - 1]) / (2.0 * h));
    out.push_back((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) /
                  (2.0 * h));
    return out;
}

template <typename T>
std::vector<T> grid_derivative(const std::vector<T>& values, const Grid& grid) {
    return grid_derivative(values, grid.h);
}

}  // namespace krein
