#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "mumetrics/linalg.hpp"

namespace mumetrics {

// Deterministic draws on top of mt19937_64 (the engine's output sequence is
// pinned by the standard; distributions are hand-rolled because the library
// distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1), 53-bit resolution
    double uniform() {
        return double(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
    }

    complex_t complex_normal() {
        return {normal(), normal()};
    }

    Matrix ginibre(int rows, int cols) {
        Matrix g(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) g(i, j) = complex_normal();
        return g;
    }

    Matrix random_hermitian(int d, double scale = 1.0) {
        Matrix g = ginibre(d, d);
        return scale * 0.5 * (g + g.adjoint());
    }

    // Haar measure: QR of a Ginibre matrix with the R diagonal phase fixed.
    Matrix haar_unitary(int d) {
        Matrix g = ginibre(d, d);
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < d; ++i) {
            complex_t diag = r(i, i);
            double mag = std::abs(diag);
            q.col(i) *= mag > 0.0 ? diag / mag : complex_t(1.0, 0.0);
        }
        return q;
    }

    Vector random_unit_vector(int d) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v[i] = complex_normal();
        double n = v.norm();
        while (n < 1e-12) {  // measure-zero guard
            for (int i = 0; i < d; ++i) v[i] = complex_normal();
            n = v.norm();
        }
        return v / n;
    }

    // Full-rank density matrix G G† / tr
    Matrix random_density(int d) {
        Matrix g = ginibre(d, d);
        Matrix rho = g * g.adjoint();
        return rho / rho.trace().real();
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace mumetrics
