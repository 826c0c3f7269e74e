#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mumetrics {

using complex_t = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Structural invariants hold to 1e-10, example-level equalities to 1e-12.
inline constexpr double structural_tol = 1e-10;
inline constexpr double equality_tol = 1e-12;

inline bool finite_entries(const Matrix& m) {
    return m.allFinite();
}

inline bool is_square(const Matrix& m) {
    return m.rows() == m.cols();
}

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = equality_tol) {
    return is_square(m) && hermiticity_defect(m) <= tol;
}

inline Matrix hermitize(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

enum class Keep { first, second };

// Composite index convention: (i, j) -> i*d2 + j, first factor major.
inline Matrix partial_trace(const Matrix& m, int d1, int d2, Keep keep) {
    if (m.rows() != Eigen::Index(d1) * d2 || m.cols() != m.rows())
        throw std::invalid_argument("partial_trace: matrix is not " + std::to_string(d1) + "x" +
                                    std::to_string(d2) + " composite");
    if (keep == Keep::first) {
        Matrix out = Matrix::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d1; ++j)
                for (int k = 0; k < d2; ++k)
                    out(i, j) += m(i * d2 + k, j * d2 + k);
        return out;
    }
    Matrix out = Matrix::Zero(d2, d2);
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j)
            for (int k = 0; k < d1; ++k)
                out(i, j) += m(k * d2 + i, k * d2 + j);
    return out;
}

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // columns match values
};

inline EigenSystem eigh(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const Matrix& hermitian_m) {
    return eigh(hermitian_m).values.minCoeff();
}

inline bool is_psd(const Matrix& m, double tol = structural_tol) {
    return is_hermitian(m, tol) && min_eigenvalue(hermitize(m)) >= -tol;
}

// Square root of a PSD matrix. Eigenvalues within rounding distance of 0
// (relative to the top of the spectrum) are noise; the square root would
// amplify +1e-16 junk to 1e-8 amplitudes, so they clamp to 0 instead.
inline Matrix psd_sqrt(const Matrix& m) {
    EigenSystem es = eigh(hermitize(m));
    const double top = es.values.size() > 0 ? es.values.maxCoeff() : 0.0;
    const double cutoff = top > 0.0 ? 1e-13 * top : 0.0;
    Eigen::VectorXd roots(es.values.size());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
        roots[i] = es.values[i] > cutoff ? std::sqrt(es.values[i]) : 0.0;
    return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

inline Matrix dft_matrix(int d) {
    Matrix f(d, d);
    const double norm = 1.0 / std::sqrt(double(d));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double angle = 2.0 * M_PI * double(j) * double(k) / double(d);
            f(j, k) = norm * complex_t(std::cos(angle), std::sin(angle));
        }
    return f;
}

// Extends the given orthonormal columns to a full orthonormal basis
// (Gram-Schmidt against the identity basis; deterministic).
inline Matrix complete_orthonormal(const Matrix& columns) {
    const Eigen::Index d = columns.rows();
    if (columns.cols() > d)
        throw std::invalid_argument("complete_orthonormal: more columns than dimension");
    std::vector<Vector> basis;
    basis.reserve(size_t(d));
    for (Eigen::Index c = 0; c < columns.cols(); ++c)
        basis.push_back(columns.col(c));
    for (Eigen::Index k = 0; k < d && Eigen::Index(basis.size()) < d; ++k) {
        Vector v = Vector::Zero(d);
        v[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize for stability
            for (const Vector& b : basis) v -= b.dot(v) * b;
        double n = v.norm();
        if (n > 1e-8) basis.push_back(v / n);
    }
    if (Eigen::Index(basis.size()) != d)
        throw std::runtime_error("complete_orthonormal: input columns not orthonormal");
    Matrix out(d, d);
    for (Eigen::Index c = 0; c < d; ++c) out.col(c) = basis[size_t(c)];
    return out;
}

}  // namespace mumetrics
