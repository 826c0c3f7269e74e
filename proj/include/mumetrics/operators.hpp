#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mumetrics/distribution.hpp"
#include "mumetrics/linalg.hpp"

namespace mumetrics {

class Operator {
public:
    explicit Operator(Matrix entries) : entries_(std::move(entries)) {
        if (!is_square(entries_) || entries_.rows() == 0)
            throw std::invalid_argument("Operator: entries must be square and nonempty");
        if (!finite_entries(entries_))
            throw std::invalid_argument("Operator: entries must be finite");
    }

    static Operator identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }
    static Operator zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

    int dim() const { return int(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    bool hermitian(double tol = equality_tol) const { return hermiticity_defect(entries_) <= tol; }
    complex_t trace() const { return entries_.trace(); }

private:
    Matrix entries_;
};

// {dim, entries: [[re, im], ...] row-major}, the report-embedding form.
inline std::string operator_to_json(const Operator& op) {
    std::string out = "{\"dim\": " + std::to_string(op.dim()) + ", \"entries\": [";
    char buf[96];
    const Matrix& m = op.entries();
    bool first = true;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%s[%.17g, %.17g]", first ? "" : ", ", m(i, j).real(),
                          m(i, j).imag());
            out += buf;
            first = false;
        }
    return out + "]}";
}

class State {
public:
    explicit State(const Operator& density) : density_(density.entries()) {
        if (!is_hermitian(density_, 1e-10))
            throw std::invalid_argument("State: density not Hermitian");
        density_ = hermitize(density_);
        if (min_eigenvalue(density_) < -1e-12)
            throw std::invalid_argument("State: density has negative eigenvalue");
        if (std::abs(density_.trace().real() - 1.0) > 1e-12 || std::abs(density_.trace().imag()) > 1e-12)
            throw std::invalid_argument("State: trace must be 1");
    }

    static State pure(const Vector& psi) {
        double n = psi.norm();
        if (n < 1e-12) throw std::invalid_argument("State::pure: zero vector");
        Vector u = psi / n;
        return State(Operator(u * u.adjoint()));
    }

    static State maximally_mixed(int dim) {
        return State(Operator(Matrix::Identity(dim, dim) / double(dim)));
    }

    int dim() const { return int(density_.rows()); }
    const Matrix& density() const { return density_; }
    Matrix sqrt_density() const { return psd_sqrt(density_); }

    double expectation(const Matrix& observable) const {
        return (density_ * observable).trace().real();
    }

private:
    Matrix density_;
};

// Hermitian operator together with its spectral resolution. Projectors, not
// eigenvectors, are the contract: degenerate clusters keep a single projector.
class Observable {
public:
    explicit Observable(const Operator& op) : matrix_(hermitize(op.entries())) {
        if (!op.hermitian(1e-10)) throw std::invalid_argument("Observable: operator not Hermitian");
        EigenSystem es = eigh(matrix_);
        const double scale = std::max(1.0, double(es.values.cwiseAbs().maxCoeff()));
        const double cluster_tol = 1e-11 * scale;
        Eigen::Index i = 0;
        while (i < es.values.size()) {
            Eigen::Index j = i;
            while (j + 1 < es.values.size() && es.values[j + 1] - es.values[j] <= cluster_tol) ++j;
            Matrix block = es.vectors.middleCols(i, j - i + 1);
            projectors_.push_back(block * block.adjoint());
            eigenvalues_.push_back(es.values.segment(i, j - i + 1).mean());
            i = j + 1;
        }
        validate();
    }

    Observable(std::vector<double> eigenvalues, std::vector<Matrix> projectors)
        : eigenvalues_(std::move(eigenvalues)), projectors_(std::move(projectors)) {
        if (eigenvalues_.empty() || eigenvalues_.size() != projectors_.size())
            throw std::invalid_argument("Observable: eigenvalue/projector size mismatch");
        for (size_t k = 0; k + 1 < eigenvalues_.size(); ++k)
            if (!(eigenvalues_[k] < eigenvalues_[k + 1]))
                throw std::invalid_argument("Observable: eigenvalues must be strictly increasing");
        const Eigen::Index d = projectors_[0].rows();
        matrix_ = Matrix::Zero(d, d);
        for (size_t k = 0; k < projectors_.size(); ++k) matrix_ += eigenvalues_[k] * projectors_[k];
        validate();
    }

    // Diagonal observable with exact basis projectors (grid position analogs);
    // equal values merge into one projector.
    static Observable diagonal(const std::vector<double>& values) {
        const int d = int(values.size());
        std::vector<int> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
        std::vector<double> eigenvalues;
        std::vector<Matrix> projectors;
        size_t i = 0;
        while (i < order.size()) {
            size_t j = i;
            Matrix proj = Matrix::Zero(d, d);
            proj(order[i], order[i]) = 1.0;
            while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
                ++j;
                proj(order[j], order[j]) = 1.0;
            }
            eigenvalues.push_back(values[order[i]]);
            projectors.push_back(std::move(proj));
            i = j + 1;
        }
        return Observable(std::move(eigenvalues), std::move(projectors));
    }

    int dim() const { return int(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    const std::vector<Matrix>& projectors() const { return projectors_; }

    // Conjugated observable u A u†, same spectrum.
    Observable conjugated(const Matrix& u) const {
        std::vector<Matrix> projectors;
        projectors.reserve(projectors_.size());
        for (const Matrix& p : projectors_) projectors.push_back(u * p * u.adjoint());
        return Observable(eigenvalues_, std::move(projectors));
    }

private:
    void validate() const {
        const Eigen::Index d = matrix_.rows();
        Matrix sum = Matrix::Zero(d, d);
        for (size_t k = 0; k < projectors_.size(); ++k) {
            const Matrix& p = projectors_[k];
            if (p.rows() != d || p.cols() != d)
                throw std::invalid_argument("Observable: projector dimension mismatch");
            if ((p * p - p).cwiseAbs().maxCoeff() > structural_tol)
                throw std::invalid_argument("Observable: projector not idempotent");
            for (size_t l = k + 1; l < projectors_.size(); ++l)
                if ((p * projectors_[l]).cwiseAbs().maxCoeff() > structural_tol)
                    throw std::invalid_argument("Observable: projectors not orthogonal");
            sum += p;
        }
        if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > structural_tol)
            throw std::invalid_argument("Observable: projectors do not resolve identity");
        Matrix recombined = Matrix::Zero(d, d);
        for (size_t k = 0; k < projectors_.size(); ++k) recombined += eigenvalues_[k] * projectors_[k];
        if ((recombined - matrix_).cwiseAbs().maxCoeff() > structural_tol)
            throw std::invalid_argument("Observable: spectral data does not recombine to operator");
    }

    Matrix matrix_;
    std::vector<double> eigenvalues_;
    std::vector<Matrix> projectors_;
};

class DiscretePOVM {
public:
    DiscretePOVM(std::vector<double> outcomes, std::vector<Matrix> effects)
        : outcomes_(std::move(outcomes)), effects_(std::move(effects)) {
        if (outcomes_.empty() || outcomes_.size() != effects_.size())
            throw std::invalid_argument("DiscretePOVM: outcome/effect size mismatch");
        for (size_t i = 0; i + 1 < outcomes_.size(); ++i)
            if (!(outcomes_[i] < outcomes_[i + 1]))
                throw std::invalid_argument("DiscretePOVM: outcomes must be strictly increasing");
        const Eigen::Index d = effects_[0].rows();
        Matrix sum = Matrix::Zero(d, d);
        for (const Matrix& e : effects_) {
            if (e.rows() != d || e.cols() != d)
                throw std::invalid_argument("DiscretePOVM: effect dimension mismatch");
            if (!is_hermitian(e, structural_tol) || min_eigenvalue(hermitize(e)) < -structural_tol)
                throw std::invalid_argument("DiscretePOVM: effect not PSD");
            sum += e;
        }
        if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > structural_tol)
            throw std::invalid_argument("DiscretePOVM: effects do not sum to identity");
    }

    size_t size() const { return outcomes_.size(); }
    int dim() const { return int(effects_[0].rows()); }
    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<Matrix>& effects() const { return effects_; }

private:
    std::vector<double> outcomes_;
    std::vector<Matrix> effects_;
};

inline DiscretePOVM spectral_povm(const Observable& obs) {
    return DiscretePOVM(obs.eigenvalues(), obs.projectors());
}

class QuantumChannel {
public:
    explicit QuantumChannel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
        if (kraus_.empty()) throw std::invalid_argument("QuantumChannel: no Kraus operators");
        const Eigen::Index out = kraus_[0].rows();
        const Eigen::Index in = kraus_[0].cols();
        Matrix sum = Matrix::Zero(in, in);
        for (const Matrix& k : kraus_) {
            if (k.rows() != out || k.cols() != in)
                throw std::invalid_argument("QuantumChannel: Kraus shape mismatch");
            sum += k.adjoint() * k;
        }
        if ((sum - Matrix::Identity(in, in)).cwiseAbs().maxCoeff() > structural_tol)
            throw std::invalid_argument("QuantumChannel: not trace-preserving");
    }

    int input_dim() const { return int(kraus_[0].cols()); }
    int output_dim() const { return int(kraus_[0].rows()); }
    const std::vector<Matrix>& kraus() const { return kraus_; }

    Matrix apply(const Matrix& rho) const {
        Matrix out = Matrix::Zero(output_dim(), output_dim());
        for (const Matrix& k : kraus_) out += k * rho * k.adjoint();
        return out;
    }

    State apply(const State& s) const { return State(Operator(hermitize(apply(s.density())))); }

    // Heisenberg picture Σ K† X K
    Matrix heisenberg(const Matrix& x) const {
        Matrix out = Matrix::Zero(input_dim(), input_dim());
        for (const Matrix& k : kraus_) out += k.adjoint() * x * k;
        return out;
    }

private:
    std::vector<Matrix> kraus_;
};

// Probe state + coupling unitary on system⊗probe + pointer observable on the
// probe factor. Composite index is system-major: (i, j) -> i*d2 + j.
class MeasurementModel {
public:
    MeasurementModel(State probe, Operator coupling, Observable pointer)
        : probe_(std::move(probe)), coupling_(std::move(coupling)), pointer_(std::move(pointer)) {
        if (pointer_.dim() != probe_.dim())
            throw std::invalid_argument("MeasurementModel: pointer must act on the probe space");
        if (coupling_.dim() % probe_.dim() != 0)
            throw std::invalid_argument("MeasurementModel: coupling dim not divisible by probe dim");
        const Matrix& u = coupling_.entries();
        if ((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() >
            structural_tol)
            throw std::invalid_argument("MeasurementModel: coupling not unitary");
    }

    int system_dim() const { return coupling_.dim() / probe_.dim(); }
    int probe_dim() const { return probe_.dim(); }
    const State& probe() const { return probe_; }
    const Operator& coupling() const { return coupling_; }
    const Observable& pointer() const { return pointer_; }

private:
    State probe_;
    Operator coupling_;
    Observable pointer_;
};

inline Operator tensor(const Operator& a, const Operator& b) {
    return Operator(kron(a.entries(), b.entries()));
}

inline Operator partial_trace(const Operator& o, int d1, int d2, Keep keep) {
    return Operator(partial_trace(o.entries(), d1, d2, keep));
}

// Effect for pointer outcome x: Tr_probe[(1⊗√σ) U†(1⊗Π_x)U (1⊗√σ)].
// The √σ sandwich keeps each effect manifestly PSD.
inline DiscretePOVM model_to_povm(const MeasurementModel& m) {
    const int d1 = m.system_dim();
    const int d2 = m.probe_dim();
    const Matrix& u = m.coupling().entries();
    const Matrix id1 = Matrix::Identity(d1, d1);
    const Matrix sandwich = kron(id1, m.probe().sqrt_density());
    std::vector<Matrix> effects;
    effects.reserve(m.pointer().projectors().size());
    for (const Matrix& proj : m.pointer().projectors()) {
        Matrix lifted = u.adjoint() * kron(id1, proj) * u;
        effects.push_back(hermitize(partial_trace(sandwich * lifted * sandwich, d1, d2, Keep::first)));
    }
    return DiscretePOVM(m.pointer().eigenvalues(), std::move(effects));
}

// Kraus operators K_{k,j} = √s_j (1⊗⟨k|) U (1⊗|χ_j⟩) from the spectral
// decomposition σ = Σ s_j |χ_j⟩⟨χ_j| of the probe (no purification factor).
inline QuantumChannel model_to_channel(const MeasurementModel& m) {
    const int d1 = m.system_dim();
    const int d2 = m.probe_dim();
    const Matrix& u = m.coupling().entries();
    EigenSystem probe_es = eigh(m.probe().density());
    std::vector<Matrix> kraus;
    for (Eigen::Index j = 0; j < probe_es.values.size(); ++j) {
        double weight = probe_es.values[j];
        if (weight < 1e-14) continue;  // null probe component contributes no Kraus term
        double root = std::sqrt(weight);
        const Vector chi = probe_es.vectors.col(j);
        for (int k = 0; k < d2; ++k) {
            Matrix block(d1, d1);
            for (int a = 0; a < d1; ++a)
                for (int b = 0; b < d1; ++b) {
                    complex_t acc = 0.0;
                    for (int c = 0; c < d2; ++c) acc += u(a * d2 + k, b * d2 + c) * chi[c];
                    block(a, b) = root * acc;
                }
            kraus.push_back(std::move(block));
        }
    }
    return QuantumChannel(std::move(kraus));
}

// Mₖ = Σ xᵏ E_x. Powers by iterated multiply so that M₁ of a spectral POVM
// reproduces the operator bitwise.
inline Operator moment_operator(const DiscretePOVM& p, int k) {
    if (k < 0 || k > 4) throw std::invalid_argument("moment_operator: k must be in [0, 4]");
    Matrix out = Matrix::Zero(p.dim(), p.dim());
    for (size_t i = 0; i < p.size(); ++i) {
        double coeff = 1.0;
        for (int j = 0; j < k; ++j) coeff *= p.outcomes()[i];
        out += coeff * p.effects()[i];
    }
    return Operator(out);
}

inline Distribution outcome_distribution(const DiscretePOVM& p, const State& s) {
    if (p.dim() != s.dim()) throw std::invalid_argument("outcome_distribution: dimension mismatch");
    std::vector<double> probs;
    probs.reserve(p.size());
    for (const Matrix& e : p.effects()) probs.push_back((s.density() * e).trace().real());
    return Distribution(p.outcomes(), std::move(probs));
}

inline Operator heisenberg_apply(const QuantumChannel& c, const Operator& x) {
    if (c.output_dim() != x.dim()) throw std::invalid_argument("heisenberg_apply: dimension mismatch");
    return Operator(c.heisenberg(x.entries()));
}

}  // namespace mumetrics
