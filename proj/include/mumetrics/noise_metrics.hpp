#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mumetrics/operators.hpp"

namespace mumetrics {

// ε_O, η_O, their product, and the Eq.-style product bound check.
struct NoiseReport {
    double epsilon;
    double eta;
    double product;
    double bound;
    bool violated;
    double raw_epsilon_sq;  // before the clamp to 0
    double raw_eta_sq;
};

inline std::string noise_report_to_json(const NoiseReport& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "{\"epsilon\": %.17g, \"eta\": %.17g, \"product\": %.17g, \"bound\": %.17g, "
                  "\"violated\": %s, \"raw_epsilon_sq\": %.17g, \"raw_eta_sq\": %.17g}",
                  r.epsilon, r.eta, r.product, r.bound, r.violated ? "true" : "false",
                  r.raw_epsilon_sq, r.raw_eta_sq);
    return buf;
}

// ε² = tr[ρM₂] − tr[ρ(M₁A + AM₁)] + tr[ρA²], regrouped as
//   tr[ρ(M₁−A)²] + Σ_x tr[ρ(x−M₁)E_x(x−M₁)]
// (the second sum equals tr[ρ(M₂−M₁²)] since Σ E_x = 1). Each term is a
// nonnegative Frobenius norm, so a sharp measurement of the target comes out
// exactly 0 instead of drowning in trace cancellation at the 1e-16 level.
inline double ozawa_error_sq(const State& s, const Observable& target, const DiscretePOVM& p) {
    if (target.dim() != s.dim() || p.dim() != s.dim())
        throw std::invalid_argument("ozawa_error: dimension mismatch");
    const Matrix root = s.sqrt_density();
    const Matrix m1 = moment_operator(p, 1).entries();
    const Matrix sharp_defect = m1 - target.matrix();
    double acc = (sharp_defect * root).squaredNorm();
    const Matrix id = Matrix::Identity(s.dim(), s.dim());
    for (size_t i = 0; i < p.size(); ++i) {
        Matrix spread = p.outcomes()[i] * id - m1;
        acc += (psd_sqrt(p.effects()[i]) * spread * root).squaredNorm();
    }
    return acc;
}

inline double ozawa_error(const State& s, const Observable& target, const DiscretePOVM& p) {
    return std::sqrt(std::max(0.0, ozawa_error_sq(s, target, p)));
}

// η² = tr[ρΛ*(B²)] − tr[ρ(Λ*(B)B + BΛ*(B))] + tr[ρB²], regrouped as
//   tr[ρ(Λ*(B)−B)²] + Σ_k tr[ρ(BK_k − K_kΛ*(B))†(BK_k − K_kΛ*(B))]
// (the sum is the Kadison-Schwarz defect tr[ρ(Λ*(B²)−Λ*(B)²)]).
inline double ozawa_disturbance_sq(const State& s, const Observable& obs, const QuantumChannel& c) {
    if (c.input_dim() != c.output_dim())
        throw std::invalid_argument("ozawa_disturbance: channel must preserve the system space");
    if (obs.dim() != s.dim() || c.input_dim() != s.dim())
        throw std::invalid_argument("ozawa_disturbance: dimension mismatch");
    const Matrix root = s.sqrt_density();
    const Matrix& b = obs.matrix();
    const Matrix lb = c.heisenberg(b);
    double acc = ((lb - b) * root).squaredNorm();
    for (const Matrix& k : c.kraus()) acc += ((b * k - k * lb) * root).squaredNorm();
    return acc;
}

inline double ozawa_disturbance(const State& s, const Observable& obs, const QuantumChannel& c) {
    return std::sqrt(std::max(0.0, ozawa_disturbance_sq(s, obs, c)));
}

// Eq.-(1) verbatim form tr[ρ⊗σ (U†(1⊗Z)U − A⊗1)²]; the oracle for ozawa_error.
inline double ozawa_error_dilated(const State& s, const MeasurementModel& m,
                                  const Observable& target) {
    if (m.system_dim() != s.dim() || target.dim() != s.dim())
        throw std::invalid_argument("ozawa_error_dilated: dimension mismatch");
    const Matrix& u = m.coupling().entries();
    const Matrix id1 = Matrix::Identity(s.dim(), s.dim());
    const Matrix id2 = Matrix::Identity(m.probe_dim(), m.probe_dim());
    Matrix diff = u.adjoint() * kron(id1, m.pointer().matrix()) * u - kron(target.matrix(), id2);
    Matrix joint_root = kron(s.sqrt_density(), m.probe().sqrt_density());
    return std::sqrt(std::max(0.0, (diff * joint_root).squaredNorm()));
}

// Eq.-(2) verbatim form tr[ρ⊗σ (U†(B⊗1)U − B⊗1)²]; the oracle for ozawa_disturbance.
inline double ozawa_disturbance_dilated(const State& s, const MeasurementModel& m,
                                        const Observable& obs) {
    if (m.system_dim() != s.dim() || obs.dim() != s.dim())
        throw std::invalid_argument("ozawa_disturbance_dilated: dimension mismatch");
    const Matrix& u = m.coupling().entries();
    const Matrix id2 = Matrix::Identity(m.probe_dim(), m.probe_dim());
    Matrix lifted = kron(obs.matrix(), id2);
    Matrix diff = u.adjoint() * lifted * u - lifted;
    Matrix joint_root = kron(s.sqrt_density(), m.probe().sqrt_density());
    return std::sqrt(std::max(0.0, (diff * joint_root).squaredNorm()));
}

// Statistics-only reconstruction of ε_O: first/second outcome moments of p on
// the three states ρ, AρA, (1+A)ρ(1+A) plus the target's own second moment,
// via tr[ρ(M₁A+AM₁)] = tr[M₁(1+A)ρ(1+A)] − tr[M₁ρ] − tr[M₁AρA].
// Pays for the statistical route with a ~1e-8 cancellation floor on tiny ε.
inline double three_state_error(const State& s, const Observable& target, const DiscretePOVM& p) {
    if (target.dim() != s.dim() || p.dim() != s.dim())
        throw std::invalid_argument("three_state_error: dimension mismatch");
    const Matrix& a = target.matrix();
    const Matrix& rho = s.density();
    const Matrix one_plus_a = Matrix::Identity(s.dim(), s.dim()) + a;
    const Matrix rho_a = a * rho * a;
    const Matrix rho_plus = one_plus_a * rho * one_plus_a;

    auto outcome_moment = [&](const Matrix& tau, int k) {
        if (std::abs(tau.trace().real()) < 1e-14) return 0.0;
        double acc = 0.0;
        for (size_t i = 0; i < p.size(); ++i) {
            double coeff = 1.0;
            for (int j = 0; j < k; ++j) coeff *= p.outcomes()[i];
            acc += coeff * (tau * p.effects()[i]).trace().real();
        }
        return acc;
    };

    double cross = outcome_moment(rho_plus, 1) - outcome_moment(rho, 1) - outcome_moment(rho_a, 1);
    double target_sq = 0.0;  // Σ a² tr[ρΠ_a]: the target's own reference statistics
    for (size_t k = 0; k < target.eigenvalues().size(); ++k) {
        double ev = target.eigenvalues()[k];
        target_sq += ev * ev * (rho * target.projectors()[k]).trace().real();
    }
    double eps_sq = outcome_moment(rho, 2) - cross + target_sq;
    return std::sqrt(std::max(0.0, eps_sq));
}

// Instrument-level product check: ε against targetA from the POVM, η against
// targetB from the channel, flag honest.
inline NoiseReport product_check(const State& s, const DiscretePOVM& p, const QuantumChannel& c,
                                 const Observable& target_a, const Observable& target_b,
                                 double bound) {
    NoiseReport r;
    r.raw_epsilon_sq = ozawa_error_sq(s, target_a, p);
    r.raw_eta_sq = ozawa_disturbance_sq(s, target_b, c);
    r.epsilon = std::sqrt(std::max(0.0, r.raw_epsilon_sq));
    r.eta = std::sqrt(std::max(0.0, r.raw_eta_sq));
    r.product = r.epsilon * r.eta;
    r.bound = bound;
    r.violated = r.product < bound - 1e-12;
    return r;
}

inline NoiseReport product_check(const State& s, const MeasurementModel& m,
                                 const Observable& target_a, const Observable& target_b,
                                 double bound) {
    return product_check(s, model_to_povm(m), model_to_channel(m), target_a, target_b, bound);
}

}  // namespace mumetrics
