#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace mumetrics {

// Phase space conventions: single mode (Q, P), two modes ordered
// (Q1, P1, Q2, P2), hbar = 1.

inline Eigen::Matrix2d symplectic_form_2() {
    Eigen::Matrix2d o;
    o << 0.0, 1.0, -1.0, 0.0;
    return o;
}

inline Eigen::Matrix4d symplectic_form_4() {
    Eigen::Matrix4d o = Eigen::Matrix4d::Zero();
    o.block<2, 2>(0, 0) = symplectic_form_2();
    o.block<2, 2>(2, 2) = symplectic_form_2();
    return o;
}

// Smallest eigenvalue of c + (i/2) Omega1. Nonnegative (within tolerance)
// exactly when c is an admissible one-mode covariance.
inline double uncertainty_margin(const Eigen::Matrix2d& c) {
    double half_tr = 0.5 * (c(0, 0) + c(1, 1));
    double half_gap = 0.5 * (c(0, 0) - c(1, 1));
    double off_sq = c(0, 1) * c(0, 1) + 0.25;
    return half_tr - std::sqrt(half_gap * half_gap + off_sq);
}

class GaussianState {
public:
    GaussianState(Eigen::Vector2d mean, Eigen::Matrix2d cov)
        : mean_(std::move(mean)), cov_(std::move(cov)) {
        if (std::abs(cov_(0, 1) - cov_(1, 0)) > 1e-12)
            throw std::invalid_argument("GaussianState: covariance must be symmetric");
        cov_(0, 1) = cov_(1, 0) = 0.5 * (cov_(0, 1) + cov_(1, 0));
        if (uncertainty_margin(cov_) < -1e-10)
            throw std::invalid_argument("GaussianState: covariance violates the uncertainty bound");
    }

    static GaussianState vacuum() {
        return GaussianState(Eigen::Vector2d::Zero(), 0.5 * Eigen::Matrix2d::Identity());
    }

    // Pure squeezed state with the given position variance.
    static GaussianState squeezed(double position_var) {
        if (position_var <= 0.0)
            throw std::invalid_argument("GaussianState: position variance must be positive");
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        cov(0, 0) = position_var;
        cov(1, 1) = 0.25 / position_var;
        return GaussianState(Eigen::Vector2d::Zero(), cov);
    }

    GaussianState displaced(double q, double p) const {
        return GaussianState(mean_ + Eigen::Vector2d(q, p), cov_);
    }

    const Eigen::Vector2d& mean() const { return mean_; }
    const Eigen::Matrix2d& cov() const { return cov_; }

private:
    Eigen::Vector2d mean_;
    Eigen::Matrix2d cov_;
};

// Linear measurement model: a symplectic transformation on the joint phase
// space, a Gaussian probe, and the row of the transformation that is read
// out. slope_a is the readout's gearing on the input position, slope_b the
// surviving fraction of the input momentum.
class GaussianModel {
public:
    GaussianModel(Eigen::Matrix4d s, GaussianState probe, int readout_row, double slope_a,
                  double slope_b)
        : s_(std::move(s)),
          probe_(std::move(probe)),
          readout_row_(readout_row),
          slope_a_(slope_a),
          slope_b_(slope_b) {
        if (readout_row_ < 0 || readout_row_ >= 4)
            throw std::invalid_argument("GaussianModel: readout row out of range");
        Eigen::Matrix4d omega = symplectic_form_4();
        double defect = (s_.transpose() * omega * s_ - omega).cwiseAbs().maxCoeff();
        if (defect > 1e-10)
            throw std::invalid_argument("GaussianModel: transformation is not symplectic");
        if (std::abs(s_(readout_row_, 0) - slope_a_) > 1e-12)
            throw std::invalid_argument("GaussianModel: readout row does not carry slope_a");
        if (std::abs(s_(1, 1) - slope_b_) > 1e-12)
            throw std::invalid_argument("GaussianModel: momentum row does not carry slope_b");
    }

    const Eigen::Matrix4d& s_matrix() const { return s_; }
    const GaussianState& probe() const { return probe_; }
    int readout_row() const { return readout_row_; }
    double slope_a() const { return slope_a_; }
    double slope_b() const { return slope_b_; }

private:
    Eigen::Matrix4d s_;
    GaussianState probe_;
    int readout_row_;
    double slope_a_;
    double slope_b_;
};

class NoiseCovariance {
public:
    explicit NoiseCovariance(Eigen::Matrix2d n) : n_(std::move(n)) {
        if (std::abs(n_(0, 1) - n_(1, 0)) > 1e-12)
            throw std::invalid_argument("NoiseCovariance: matrix must be symmetric");
        n_(0, 1) = n_(1, 0) = 0.5 * (n_(0, 1) + n_(1, 0));
    }

    const Eigen::Matrix2d& n_matrix() const { return n_; }

private:
    Eigen::Matrix2d n_;
};

inline std::pair<double, double> scattering_slopes(double m1, double m2) {
    if (m1 <= 0.0 || m2 <= 0.0)
        throw std::invalid_argument("scattering_slopes: masses must be positive");
    return {2.0 * m1 / (m1 + m2), (m1 - m2) / (m1 + m2)};
}

// Completes the two slopes to a symplectic transformation that mixes
// positions among positions and momenta among momenta: the position block
// acts as A_q on (Q1, Q2) and the momentum block as its inverse transpose,
// which is exactly the symplectic condition for this shape. The readout is
// the probe position after the interaction (row 2).
inline GaussianModel make_linear_model(double a, double b, GaussianState probe) {
    if (a == 0.0 && b == 0.0)
        throw std::invalid_argument("make_linear_model: slopes a and b cannot both vanish");
    double alpha, beta, d;
    if (b != 0.0) {
        alpha = 1.0 / b;
        beta = 0.0;
        d = 1.0;
    } else {
        alpha = 1.0;
        beta = -1.0 / a;
        d = 0.0;
    }
    double det = alpha * d - beta * a;
    // (A_q^T)^{-1} for A_q = [[alpha, beta], [a, d]]
    double ap00 = d / det, ap01 = -a / det, ap10 = -beta / det, ap11 = alpha / det;

    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 0) = alpha;
    s(0, 2) = beta;
    s(1, 1) = ap00;
    s(1, 3) = ap01;
    s(2, 0) = a;
    s(2, 2) = d;
    s(3, 1) = ap10;
    s(3, 3) = ap11;
    return GaussianModel(s, std::move(probe), 2, a, b);
}

namespace detail {

inline Eigen::Vector4d joint_mean(const GaussianModel& m, const GaussianState& input) {
    Eigen::Vector4d mu;
    mu << input.mean()(0), input.mean()(1), m.probe().mean()(0), m.probe().mean()(1);
    return mu;
}

inline Eigen::Matrix4d joint_cov(const GaussianModel& m, const GaussianState& input) {
    Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
    sigma.block<2, 2>(0, 0) = input.cov();
    sigma.block<2, 2>(2, 2) = m.probe().cov();
    return sigma;
}

// Root mean square of a linear phase space form under the product Gaussian.
inline double linear_form_rms(const Eigen::Vector4d& w, const Eigen::Vector4d& mu,
                              const Eigen::Matrix4d& sigma) {
    double mean = w.dot(mu);
    double var = w.dot(sigma * w);
    return std::sqrt(std::max(0.0, mean * mean + var));
}

}  // namespace detail

// epsilon for the linear model: second moment of (readout after) - (Q1 before).
inline double gaussian_noise_error(const GaussianModel& m, const GaussianState& input) {
    Eigen::Vector4d w = m.s_matrix().row(m.readout_row()).transpose();
    w(0) -= 1.0;
    return detail::linear_form_rms(w, detail::joint_mean(m, input), detail::joint_cov(m, input));
}

// eta analog: second moment of (P1 after) - (P1 before).
inline double gaussian_noise_disturbance(const GaussianModel& m, const GaussianState& input) {
    Eigen::Vector4d w = m.s_matrix().row(1).transpose();
    w(1) -= 1.0;
    return detail::linear_form_rms(w, detail::joint_mean(m, input), detail::joint_cov(m, input));
}

struct RangedCalibration {
    double value;
    bool diverges;
};

// Worst estimator deviation over calibration inputs with sharp position in
// [-r, r]: the estimate is gain times the readout, the truth is q. The
// position-variance-to-zero limit is taken analytically; it blows up the
// input momentum variance, so a readout touching P1 is reported as infinite
// outright. The quadratic-in-q deviation peaks at an endpoint, and the value
// grows without bound in r exactly when the gearing gain*a is not 1.
inline RangedCalibration ranged_calibration_error(const GaussianModel& m, double gain,
                                                  double range_r) {
    if (range_r <= 0.0)
        throw std::invalid_argument("ranged_calibration_error: range must be positive");
    Eigen::Vector4d row = m.s_matrix().row(m.readout_row()).transpose();
    if (std::abs(gain * row(1)) > 1e-12)
        return {std::numeric_limits<double>::infinity(), true};

    double slope = gain * row(0) - 1.0;
    double base = gain * (row(2) * m.probe().mean()(0) + row(3) * m.probe().mean()(1));
    Eigen::Vector2d probe_part(row(2), row(3));
    double noise_var = gain * gain * probe_part.dot(m.probe().cov() * probe_part);

    double worst_bias = std::abs(slope) * range_r + std::abs(base);
    return {std::sqrt(worst_bias * worst_bias + noise_var), std::abs(slope) > 1e-12};
}

struct JointValidity {
    bool valid;
    double delta_q;
    double delta_p;
};

// A noise covariance describes an approximate joint position/momentum
// measurement (output = true distribution convolved with the noise). It is
// realizable exactly when n + (i/2) Omega1 is PSD; the marginal resolutions
// are the noise standard deviations.
inline JointValidity covariant_joint_validity(const NoiseCovariance& n) {
    const Eigen::Matrix2d& nm = n.n_matrix();
    bool valid = uncertainty_margin(nm) >= -1e-10;
    return {valid, std::sqrt(std::max(0.0, nm(0, 0))), std::sqrt(std::max(0.0, nm(1, 1)))};
}

}  // namespace mumetrics
