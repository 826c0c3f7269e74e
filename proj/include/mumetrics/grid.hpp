#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mumetrics/operators.hpp"

namespace mumetrics {

// Finite grid analogs of the canonical pair: a diagonal "position" on d points
// and its discrete-Fourier conjugate as "momentum". ħ = 1 throughout.

// {−d/2, ..., d/2−1}: includes 0, used by the continuous-variable analogs.
inline std::vector<double> grid_positions_centered(int d) {
    if (d < 2) throw std::invalid_argument("grid_positions_centered: need d >= 2");
    std::vector<double> xs(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) xs[size_t(i)] = double(i - d / 2);
    return xs;
}

// {−d/2, ..., −1, 1, ..., d/2}: symmetric under x → −x, used by the parity
// construction (even d, no 0 point).
inline std::vector<double> grid_positions_symmetric(int d) {
    if (d < 2 || d % 2 != 0)
        throw std::invalid_argument("grid_positions_symmetric: need even d >= 2");
    std::vector<double> xs(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        int k = i - d / 2;
        xs[size_t(i)] = double(k < 0 ? k : k + 1);
    }
    return xs;
}

inline Observable grid_position(const std::vector<double>& support) {
    return Observable::diagonal(support);
}

// Plane-wave unitary G[b][a] = exp(2πi·x_b·x_a/d)/√d. Columns are orthonormal
// exactly when the support is d consecutive unit-spaced points (the geometric
// sums then telescope), so that is required here.
inline Matrix grid_fourier(const std::vector<double>& support) {
    const int d = int(support.size());
    if (d < 2) throw std::invalid_argument("grid_fourier: need at least 2 points");
    for (size_t i = 0; i + 1 < support.size(); ++i)
        if (std::abs(support[i + 1] - support[i] - 1.0) > 1e-12)
            throw std::invalid_argument("grid_fourier: support must be consecutive unit-spaced");
    Matrix g(d, d);
    const double scale = 1.0 / std::sqrt(double(d));
    for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) {
            double phase = 2.0 * M_PI * support[size_t(b)] * support[size_t(a)] / double(d);
            g(b, a) = scale * complex_t(std::cos(phase), std::sin(phase));
        }
    return g;
}

// Momentum analog: eigenvectors are the plane waves of grid_fourier, eigenvalue
// (2π/d)·x for the wave labeled by grid point x. The 2π/d factor is the
// conjugate spacing of a unit-spaced grid, so the vacuum gets Var P ≈ 1/2 and
// the pair (grid_position, grid_momentum) mimics (Q, P) at ħ = 1.
inline Observable grid_momentum(const std::vector<double>& support) {
    const Matrix g = grid_fourier(support);
    const int d = int(support.size());
    std::vector<double> values(support.size());
    std::vector<Matrix> projectors;
    projectors.reserve(support.size());
    for (int a = 0; a < d; ++a) {
        values[size_t(a)] = 2.0 * M_PI * support[size_t(a)] / double(d);
        projectors.push_back(g.col(a) * g.col(a).adjoint());
    }
    return Observable(std::move(values), std::move(projectors));
}

// Normalized Gaussian profile ψ(x) ∝ exp(−(x−mean)²/(4·var)) on the grid;
// position variance ≈ var away from the grid edges.
inline Vector gaussian_grid_vector(const std::vector<double>& support, double mean, double var) {
    if (var <= 0.0) throw std::invalid_argument("gaussian_grid_vector: variance must be positive");
    Vector psi(Eigen::Index(support.size()));
    for (size_t i = 0; i < support.size(); ++i) {
        double d = support[i] - mean;
        psi[Eigen::Index(i)] = std::exp(-d * d / (4.0 * var));
    }
    double n = psi.norm();
    if (n < 1e-300) throw std::invalid_argument("gaussian_grid_vector: profile vanishes on grid");
    return psi / n;
}

// Vacuum analog: centered Gaussian with Var Q = 1/2.
inline State grid_vacuum(const std::vector<double>& support) {
    return State::pure(gaussian_grid_vector(support, 0.0, 0.5));
}

}  // namespace mumetrics
