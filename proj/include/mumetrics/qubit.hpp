#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mumetrics/linalg.hpp"
#include "mumetrics/noise_metrics.hpp"
#include "mumetrics/operators.hpp"

namespace mumetrics {

namespace detail {

// v[0]*sigma_x + v[1]*sigma_y + v[2]*sigma_z
inline Matrix bloch_matrix(const Eigen::Vector3d& v) {
    Matrix m(2, 2);
    m(0, 0) = complex_t(v[2], 0.0);
    m(0, 1) = complex_t(v[0], -v[1]);
    m(1, 0) = complex_t(v[0], v[1]);
    m(1, 1) = complex_t(-v[2], 0.0);
    return m;
}

inline void require_unit(const Eigen::Vector3d& a, const char* what) {
    if (std::abs(a.norm() - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": direction must be a unit vector");
}

}  // namespace detail

// Two-outcome qubit effect pair (1 +/- (bias*1 + bloch.sigma))/2, outcomes -1 and +1.
// Positivity of both effects is |bias| + |bloch| <= 1.
class BlochObservable {
public:
    BlochObservable(double bias, const Eigen::Vector3d& bloch) : bias_(bias), bloch_(bloch) {
        if (!std::isfinite(bias_) || !bloch_.allFinite())
            throw std::invalid_argument("BlochObservable: non-finite parameters");
        if (std::abs(bias_) + bloch_.norm() > 1.0 + 1e-12)
            throw std::invalid_argument("BlochObservable: effects not positive");
    }

    double bias() const { return bias_; }
    const Eigen::Vector3d& bloch() const { return bloch_; }

    DiscretePOVM to_povm() const {
        const Matrix id = Matrix::Identity(2, 2);
        const Matrix core = bias_ * id + detail::bloch_matrix(bloch_);
        return DiscretePOVM({-1.0, 1.0}, {0.5 * (id - core), 0.5 * (id + core)});
    }

private:
    double bias_;
    Eigen::Vector3d bloch_;
};

// Sharp +/-1 observable along a unit direction.
inline Observable sharp_qubit(const Eigen::Vector3d& a) {
    detail::require_unit(a, "sharp_qubit");
    const Matrix id = Matrix::Identity(2, 2);
    const Matrix as = detail::bloch_matrix(a);
    return Observable({-1.0, 1.0}, {0.5 * (id - as), 0.5 * (id + as)});
}

// Worst-case calibration error of an unbiased smeared observable against the
// sharp target along a: sqrt(2 (1 - a.c)).
inline double qubit_delta(const Eigen::Vector3d& a, const BlochObservable& c) {
    detail::require_unit(a, "qubit_delta");
    if (std::abs(c.bias()) > 1e-12)
        throw std::invalid_argument("qubit_delta: observable must be unbiased");
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - a.dot(c.bloch()))));
}

// Noise-operator error of the smeared observable against the sharp target,
// evaluated on the given state. For unbiased pairs this is state independent.
inline double qubit_ozawa(const Eigen::Vector3d& a, const BlochObservable& c, const State& s) {
    detail::require_unit(a, "qubit_ozawa");
    if (std::abs(c.bias()) > 1e-12)
        throw std::invalid_argument("qubit_ozawa: observable must be unbiased");
    return ozawa_error(s, sharp_qubit(a), c.to_povm());
}

// Exact joint-measurability criterion for two unbiased qubit effect pairs:
// |c + d| + |c - d| <= 2.
inline bool jointly_measurable(const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    if (!c.allFinite() || !d.allFinite())
        throw std::invalid_argument("jointly_measurable: non-finite parameters");
    if (c.norm() > 1.0 + 1e-12 || d.norm() > 1.0 + 1e-12)
        throw std::invalid_argument("jointly_measurable: vectors must lie in the unit ball");
    return (c + d).norm() + (c - d).norm() <= 2.0 + 1e-12;
}

// Four-outcome joint observable whose margins are the unbiased pairs for c and d.
// Effects G_ij = ((1 + ij*g) 1 + (i c + j d).sigma)/4 with g = (|c+d| - |c-d|)/2;
// positivity of all four is exactly the joint-measurability criterion. Outcome
// labels encode the sign pair as 2i + j, so (-,-) -> -3, (-,+) -> -1,
// (+,-) -> +1, (+,+) -> +3.
inline DiscretePOVM joint_povm(const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    if (!jointly_measurable(c, d))
        throw std::invalid_argument("joint_povm: pair admits no joint measurement");
    const double g = 0.5 * ((c + d).norm() - (c - d).norm());
    const Matrix id = Matrix::Identity(2, 2);
    std::vector<double> outcomes;
    std::vector<Matrix> effects;
    for (int i : {-1, 1})
        for (int j : {-1, 1}) {
            outcomes.push_back(double(2 * i + j));
            effects.push_back(0.25 * ((1.0 + i * j * g) * id +
                                      detail::bloch_matrix(double(i) * c + double(j) * d)));
        }
    return DiscretePOVM(std::move(outcomes), std::move(effects));
}

namespace detail {

// Half-sum/half-difference coordinates (u1, u2, w1, w2) of an unbiased pair in
// the span of the targets: c = u + w, d = u - w.
using PlanePoint = std::array<double, 4>;

// Minimum of qubit_delta(a,c)^2 + qubit_delta(b,d)^2 over jointly measurable
// unbiased pairs restricted to the span of {a, b}. Projecting any feasible pair
// onto that span preserves both inner products and can only shrink |c +/- d|,
// so the restriction is lossless. In half-sum/half-difference coordinates the
// joint-measurability criterion reads |u| + |w| <= 1 and makes the unit-ball
// constraints redundant, so a single radial scaling restores feasibility after
// any trial move; the objective is linear, so projected pattern descent slides
// along the constraint surface to the boundary optimum.
inline double plane_bound(double b1, double b2, int resolution) {
    auto feasible = [](const PlanePoint& p) {
        return std::hypot(p[0], p[1]) + std::hypot(p[2], p[3]) <= 1.0 + 1e-12;
    };
    auto project = [](PlanePoint p) {
        const double s = std::hypot(p[0], p[1]) + std::hypot(p[2], p[3]);
        if (s > 1.0)
            for (double& x : p) x /= s;
        return p;
    };
    auto value = [&](const PlanePoint& p) {
        return 4.0 - 2.0 * ((p[0] + p[2]) + b1 * (p[0] - p[2]) + b2 * (p[1] - p[3]));
    };

    double best = std::numeric_limits<double>::infinity();
    // Odd nested levels 21, 41, 81, ... up to the requested resolution: each
    // refinement halves the spacing and keeps every coarser node, and the level
    // set only grows with the resolution argument, so the result is
    // nonincreasing in resolution by construction.
    for (int r = 21; r <= (resolution | 1); r = 2 * r - 1) {
        PlanePoint level_best{0.0, 0.0, 0.0, 0.0};
        double level_value = value(level_best);
        const double h = 2.0 / (r - 1);
        for (int i1 = 0; i1 < r; ++i1) {
            const double u1 = -1.0 + h * i1;
            for (int i2 = 0; i2 < r; ++i2) {
                const double u2 = -1.0 + h * i2;
                const double nu = std::hypot(u1, u2);
                const double wallow = 1.0 + 1e-12 - nu;
                if (wallow < 0.0) continue;
                const double wmax_sq = wallow * wallow;
                for (int i3 = 0; i3 < r; ++i3) {
                    const double w1 = -1.0 + h * i3;
                    if (w1 * w1 > wmax_sq) continue;
                    for (int i4 = 0; i4 < r; ++i4) {
                        const double w2 = -1.0 + h * i4;
                        if (w1 * w1 + w2 * w2 > wmax_sq) continue;
                        const PlanePoint p{u1, u2, w1, w2};
                        const double v = value(p);
                        if (v < level_value) {
                            level_value = v;
                            level_best = p;
                        }
                    }
                }
            }
        }
        double step = h;
        while (step > 1e-9) {
            bool improved = false;
            for (int coord = 0; coord < 4; ++coord)
                for (double sign : {-1.0, 1.0}) {
                    PlanePoint q = level_best;
                    q[coord] += sign * step;
                    q = project(q);
                    const double v = value(q);
                    if (feasible(q) && v < level_value) {
                        level_value = v;
                        level_best = q;
                        improved = true;
                    }
                }
            if (!improved) step *= 0.5;
        }
        best = std::min(best, level_value);
    }
    return std::max(0.0, best);
}

}  // namespace detail

// Least achievable delta(a,c)^2 + delta(b,d)^2 over jointly measurable unbiased
// pairs. Zero iff b = +/-a; orthogonal targets give 4 - 2 sqrt(2).
inline double incompatibility_bound(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                    int resolution = 40) {
    detail::require_unit(a, "incompatibility_bound");
    detail::require_unit(b, "incompatibility_bound");
    if (resolution < 20)
        throw std::invalid_argument("incompatibility_bound: resolution must be at least 20");
    const Eigen::Vector3d e1 = a;
    Eigen::Vector3d rest = b - b.dot(e1) * e1;
    Eigen::Vector3d e2;
    if (rest.norm() > 1e-9) {
        e2 = rest.normalized();
    } else {
        // b parallel to a; any completion of the plane works.
        Eigen::Vector3d seed = std::abs(e1[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
        e2 = (seed - seed.dot(e1) * e1).normalized();
    }
    return detail::plane_bound(b.dot(e1), b.dot(e2), resolution);
}

struct TradeoffReport {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double sum_sq = 0.0;
    double ozawa_sum = 0.0;
    double bound = 0.0;
    double bound_half = 0.0;
    bool satisfied_eq4 = false;
    bool satisfied_eq5 = false;
    bool saturated = false;
};

namespace detail {

inline TradeoffReport fill_tradeoff(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                    const Eigen::Vector3d& c, const Eigen::Vector3d& d,
                                    double bound) {
    if (!jointly_measurable(c, d))
        throw std::invalid_argument("tradeoff_report: pair not jointly measurable");
    const State mixed = State::maximally_mixed(2);
    TradeoffReport r;
    r.delta_a = qubit_delta(a, BlochObservable(0.0, c));
    r.delta_b = qubit_delta(b, BlochObservable(0.0, d));
    r.sum_sq = r.delta_a * r.delta_a + r.delta_b * r.delta_b;
    r.ozawa_sum = qubit_ozawa(a, BlochObservable(0.0, c), mixed) +
                  qubit_ozawa(b, BlochObservable(0.0, d), mixed);
    r.bound = bound;
    r.bound_half = 0.5 * bound;
    r.satisfied_eq4 = r.sum_sq >= bound - 1e-9;
    r.satisfied_eq5 = r.ozawa_sum >= r.bound_half - 1e-9;
    r.saturated = std::abs(r.sum_sq - bound) <= 1e-3;
    return r;
}

}  // namespace detail

inline TradeoffReport tradeoff_report(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                      const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    return detail::fill_tradeoff(a, b, c, d, incompatibility_bound(a, b));
}

// Parameter schedule for the one-parameter smeared family: evenly spaced
// interior points plus the exact saturation parameter 1/sqrt(2).
inline std::vector<double> smeared_family_parameters(int steps) {
    if (steps < 10)
        throw std::invalid_argument("smeared_family_parameters: need at least 10 steps");
    std::vector<double> ts;
    for (int k = 1; k <= steps; ++k) ts.push_back(double(k) / (steps + 1));
    ts.push_back(M_SQRT1_2);
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts)
        if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
    return out;
}

// Smeared family c = t a, d = sqrt(1 - t^2) b for orthogonal unit targets.
// Every member sits on the joint-measurability boundary; t = 1/sqrt(2)
// saturates the additive tradeoff.
inline std::vector<TradeoffReport> smeared_family_sweep(const Eigen::Vector3d& a,
                                                        const Eigen::Vector3d& b, int steps) {
    detail::require_unit(a, "smeared_family_sweep");
    detail::require_unit(b, "smeared_family_sweep");
    if (std::abs(a.dot(b)) > 1e-9)
        throw std::invalid_argument("smeared_family_sweep: targets must be orthogonal");
    const double bound = incompatibility_bound(a, b);
    std::vector<TradeoffReport> reports;
    for (double t : smeared_family_parameters(steps)) {
        const Eigen::Vector3d c = t * a;
        const Eigen::Vector3d d = std::sqrt(1.0 - t * t) * b;
        reports.push_back(detail::fill_tradeoff(a, b, c, d, bound));
    }
    return reports;
}

}  // namespace mumetrics
