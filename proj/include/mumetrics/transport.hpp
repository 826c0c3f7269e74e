#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "mumetrics/distribution.hpp"
#include "mumetrics/linalg.hpp"
#include "mumetrics/operators.hpp"
#include "mumetrics/random.hpp"

namespace mumetrics {

// Cumulative breakpoints closer than this are treated as one breakpoint.
// Distributions that differ only by trace rounding (same support, probs off
// by ~1e-16) then come out at exactly 0 instead of sqrt(eps)-scale junk; the
// worst-case distortion for genuinely different inputs is ~1e-13 mass moved
// across the support diameter, far below the 1e-8 oracle agreement.
inline constexpr double kBreakpointSnap = 1e-13;

// Order-2 Wasserstein distance on the line via the monotone (quantile)
// coupling: sweep the merged cumulative breakpoints, charging each quantile
// segment the squared gap between the two current atoms.
inline double w2(const Distribution& p, const Distribution& q) {
    const std::vector<double>& xs = p.support();
    const std::vector<double>& ys = q.support();
    const std::vector<double>& ps = p.probs();
    const std::vector<double>& qs = q.probs();
    size_t i = 0, j = 0;
    double cp = ps[0];
    double cq = qs[0];
    double level = 0.0;
    double acc = 0.0;
    while (i < xs.size() && j < ys.size()) {
        double dx = xs[i] - ys[j];
        if (std::abs(cp - cq) <= kBreakpointSnap) {
            double next = std::max(cp, cq);
            acc += dx * dx * std::max(0.0, next - level);
            level = next;
            ++i;
            ++j;
            if (i < xs.size()) cp += ps[i];
            if (j < ys.size()) cq += qs[j];
        } else if (cp < cq) {
            acc += dx * dx * std::max(0.0, cp - level);
            level = cp;
            ++i;
            if (i < xs.size()) cp += ps[i];
        } else {
            acc += dx * dx * std::max(0.0, cq - level);
            level = cq;
            ++j;
            if (j < ys.size()) cq += qs[j];
        }
    }
    // residual mass from a sum mismatch pairs with the last atom opposite
    while (i < xs.size()) {
        double dx = xs[i] - ys.back();
        acc += dx * dx * std::max(0.0, cp - level);
        level = std::max(level, cp);
        ++i;
        if (i < xs.size()) cp += ps[i];
    }
    while (j < ys.size()) {
        double dx = xs.back() - ys[j];
        acc += dx * dx * std::max(0.0, cq - level);
        level = std::max(level, cq);
        ++j;
        if (j < ys.size()) cq += qs[j];
    }
    return std::sqrt(std::max(0.0, acc));
}

inline double distribution_error(const State& s, const Observable& target, const DiscretePOVM& p) {
    if (target.dim() != s.dim() || p.dim() != s.dim())
        throw std::invalid_argument("distribution_error: dimension mismatch");
    Distribution ideal = outcome_distribution(spectral_povm(target), s);
    Distribution actual = outcome_distribution(p, s);
    return w2(ideal, actual);
}

inline double distribution_disturbance(const State& s, const Observable& obs, const QuantumChannel& c) {
    if (c.input_dim() != c.output_dim())
        throw std::invalid_argument("distribution_disturbance: channel must preserve the system space");
    if (obs.dim() != s.dim() || c.input_dim() != s.dim())
        throw std::invalid_argument("distribution_disturbance: dimension mismatch");
    DiscretePOVM sharp = spectral_povm(obs);
    Distribution before = outcome_distribution(sharp, s);
    Distribution after = outcome_distribution(sharp, c.apply(s));
    return w2(before, after);
}

struct CalibrationResult {
    double worst_value;
    std::map<double, double> per_eigenvalue;
    double argmax_eigenvalue;
};

// Deviation of the measured distribution from a sharp input value. For each
// eigenvalue a the quantity is sup over unit vectors psi in the eigenspace
// of sqrt(sum_x prob_psi(x) (x-a)^2), which is the top eigenvalue of the
// deviation operator sum_x (x-a)^2 E_x compressed to the eigenspace. The
// compression is exact, so it dominates any finite sample of basis choices.
inline CalibrationResult calibration_error(const Observable& target, const DiscretePOVM& p) {
    if (target.dim() != p.dim())
        throw std::invalid_argument("calibration_error: dimension mismatch");
    const int d = target.dim();
    CalibrationResult out{0.0, {}, target.eigenvalues().front()};
    bool first = true;
    for (size_t e = 0; e < target.eigenvalues().size(); ++e) {
        const double a = target.eigenvalues()[e];
        Matrix dev = Matrix::Zero(d, d);
        for (size_t x = 0; x < p.size(); ++x) {
            double g = p.outcomes()[x] - a;
            dev += (g * g) * p.effects()[x];
        }
        EigenSystem ps = eigh(hermitize(target.projectors()[e]));
        int rank = 0;
        for (Eigen::Index k = 0; k < ps.values.size(); ++k)
            if (ps.values[k] > 0.5) ++rank;
        Matrix basis(d, rank);
        int col = 0;
        for (Eigen::Index k = 0; k < ps.values.size(); ++k)
            if (ps.values[k] > 0.5) basis.col(col++) = ps.vectors.col(k);
        Matrix compressed = basis.adjoint() * dev * basis;
        double top = eigh(hermitize(compressed)).values.maxCoeff();
        double value = std::sqrt(std::max(0.0, top));
        out.per_eigenvalue[a] = value;
        if (first || value > out.worst_value) {
            out.worst_value = value;
            out.argmax_eigenvalue = a;
            first = false;
        }
    }
    return out;
}

// Lower bound on sup over pure states of distribution_error, by multi-start
// stochastic ascent on the unit sphere. Seeds are the target eigenbasis (the
// calibration states) plus `restarts` pinned-seed random starts; restart r
// always draws from the same stream, so the answer is nondecreasing in
// restarts.
inline double worst_case_error(const Observable& target, const DiscretePOVM& p, int restarts) {
    if (restarts < 1) throw std::invalid_argument("worst_case_error: restarts must be >= 1");
    if (target.dim() != p.dim())
        throw std::invalid_argument("worst_case_error: dimension mismatch");
    const int d = target.dim();
    const DiscretePOVM sharp = spectral_povm(target);

    auto objective = [&](const Vector& psi) {
        std::vector<double> ideal(sharp.size()), actual(p.size());
        for (size_t x = 0; x < sharp.size(); ++x)
            ideal[x] = std::max(0.0, psi.dot(sharp.effects()[x] * psi).real());
        for (size_t x = 0; x < p.size(); ++x)
            actual[x] = std::max(0.0, psi.dot(p.effects()[x] * psi).real());
        return w2(Distribution(sharp.outcomes(), std::move(ideal)),
                  Distribution(p.outcomes(), std::move(actual)));
    };

    double best = 0.0;
    auto ascend = [&](Vector psi, Rng& rng) {
        psi.normalize();
        double f = objective(psi);
        double step = 0.5;
        int stall = 0;
        for (int it = 0; it < 400 && step > 1e-7; ++it) {
            Vector cand(d);
            for (int k = 0; k < d; ++k) cand[k] = psi[k] + step * rng.complex_normal();
            double norm = cand.norm();
            if (norm < 1e-12) continue;
            cand /= norm;
            double fc = objective(cand);
            if (fc > f) {
                f = fc;
                psi = cand;
                stall = 0;
            } else if (++stall >= 12) {
                step *= 0.5;
                stall = 0;
            }
        }
        best = std::max(best, f);
    };

    Matrix eigenbasis = eigh(hermitize(target.matrix())).vectors;
    for (int k = 0; k < d; ++k) {
        Rng rng(0x5ca1ab1eULL * 1000 + std::uint64_t(k));
        ascend(eigenbasis.col(k), rng);
    }
    for (int r = 0; r < restarts; ++r) {
        Rng rng(0xb0a710adULL * 1000 + std::uint64_t(r));
        ascend(rng.random_unit_vector(d), rng);
    }
    return best;
}

}  // namespace mumetrics
