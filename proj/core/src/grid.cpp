#include "krein/grid.hpp"

#include <cmath>

namespace krein {

Grid make_grid(double a, double b, int n_nodes) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("make_grid: endpoints must be finite");
    if (!(b > a))
        throw std::invalid_argument("make_grid: requires b > a");
    if (n_nodes < 3)
        throw std::invalid_argument("make_grid: requires at least 3 nodes");

    Grid g;
    g.a = a;
    g.b = b;
    g.h = (b - a) / static_cast<double>(n_nodes - 1);
    g.nodes.resize(n_nodes);
    for (int j = 0; j < n_nodes; ++j)
        g.nodes[j] = a + static_cast<double>(j) * g.h;
    g.nodes.back() = b;  // pin the right endpoint against accumulated rounding
    return g;
}

QuadratureWeights prefix_weights(const Grid& grid, int j, QuadRule rule) {
    if (j < 0 || j >= grid.n())
        throw std::invalid_argument("prefix_weights: node index out of range");

    QuadratureWeights qw;
    qw.rule = rule;
    if (j == 0) {
        qw.w = {0.0};  // empty interval [a, a]
        return qw;
    }

    const double h = grid.h;
    if (rule == QuadRule::Simpson) {
        if (j % 2 == 0) {
            qw.w.assign(j + 1, 0.0);
            qw.w.front() = h / 3.0;
            qw.w.back() = h / 3.0;
            for (int k = 1; k < j; ++k)
                qw.w[k] = (k % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
            return qw;
        }
        // odd panel count: composite Simpson does not fit
        qw.rule = QuadRule::Trapezoid;
        qw.fell_back = true;
    }

    qw.w.assign(j + 1, h);
    qw.w.front() = h / 2.0;
    qw.w.back() = h / 2.0;
    return qw;
}

QuadratureWeights suffix_weights(const Grid& grid, int i) {
    const int last = grid.n() - 1;
    if (i < 0 || i > last)
        throw std::invalid_argument("suffix_weights: node index out of range");

    QuadratureWeights qw;
    if (i == last) {
        qw.w = {0.0};  // empty interval [b, b]
        return qw;
    }
    qw.w.assign(last - i + 1, grid.h);
    qw.w.front() = grid.h / 2.0;
    qw.w.back() = grid.h / 2.0;
    return qw;
}

}  // namespace krein
