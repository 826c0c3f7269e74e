#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mumetrics/grid.hpp"
#include "mumetrics/noise_metrics.hpp"
#include "test_helpers.hpp"

using namespace mumetrics;
using Catch::Matchers::WithinAbs;
using helpers::max_abs_diff;

namespace {

DiscretePOVM unbiased_qubit_povm(double cx, double cy, double cz) {
    Matrix id = Matrix::Identity(2, 2);
    Matrix cs = helpers::bloch_matrix(cx, cy, cz);
    return DiscretePOVM({-1.0, 1.0}, {0.5 * (id - cs), 0.5 * (id + cs)});
}

// Sharp basis measurement followed by handing out the fixed state ψ:
// U(|x⟩⊗|0⟩) = |ψ⟩⊗|x⟩, completed to a unitary on the unused block.
MeasurementModel reprepare_model(const Vector& psi, const std::vector<double>& pointer_values) {
    const int d = int(psi.size());
    Matrix prescribed = Matrix::Zero(d * d, d);
    for (int x = 0; x < d; ++x)
        for (int i = 0; i < d; ++i) prescribed(i * d + x, x) = psi[i];
    Matrix w = complete_orthonormal(prescribed);
    Matrix u(d * d, d * d);
    int next = d;
    for (int x = 0; x < d; ++x) {
        u.col(x * d) = w.col(x);
        for (int j = 1; j < d; ++j) u.col(x * d + j) = w.col(next++);
    }
    Vector ground = Vector::Zero(d);
    ground[0] = 1.0;
    return MeasurementModel(State::pure(ground), Operator(std::move(u)),
                            Observable::diagonal(pointer_values));
}

QuantumChannel constant_channel(const Vector& psi) {
    const int d = int(psi.size());
    std::vector<Matrix> kraus;
    kraus.reserve(size_t(d));
    for (int k = 0; k < d; ++k) {
        Matrix m = Matrix::Zero(d, d);
        m.col(k) = psi;
        kraus.push_back(std::move(m));
    }
    return QuantumChannel(std::move(kraus));
}

}  // namespace

TEST_CASE("sharp measurement of its own target reports zero error", "[noise-metrics]") {
    SECTION("diagonal target, exact zero") {
        Observable x = Observable::diagonal({-2.0, -1.0, 0.0, 1.0, 2.0});
        DiscretePOVM p = spectral_povm(x);
        Rng rng(11);
        for (int i = 0; i < 5; ++i) {
            State s{Operator(rng.random_density(5))};
            REQUIRE(ozawa_error_sq(s, x, p) == 0.0);
            REQUIRE(ozawa_error(s, x, p) == 0.0);
        }
    }
    SECTION("rotated target stays below 1e-12") {
        Rng rng(12);
        Observable a{Operator(rng.random_hermitian(4))};
        DiscretePOVM p = spectral_povm(a);
        State s{Operator(rng.random_density(4))};
        REQUIRE(ozawa_error(s, a, p) < 1e-12);
    }
}

TEST_CASE("unbiased qubit smearing has a state-independent error", "[noise-metrics]") {
    Rng rng(21);
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
        a.normalize();
        Eigen::Vector3d c(rng.normal(), rng.normal(), rng.normal());
        c = rng.uniform() * c.normalized();  // any length ≤ 1 keeps the effects PSD
        Observable target{Operator(helpers::bloch_matrix(a.x(), a.y(), a.z()))};
        DiscretePOVM p = unbiased_qubit_povm(c.x(), c.y(), c.z());
        double expected = std::sqrt(2.0 * (1.0 - a.dot(c)));
        for (int i = 0; i < 5; ++i) {
            State s{Operator(rng.random_density(2))};
            REQUIRE_THAT(ozawa_error(s, target, p), WithinAbs(expected, 1e-12));
        }
    }

    SECTION("sample spread over 100 states is at rounding level") {
        Observable target{Operator(helpers::pauli_z())};
        DiscretePOVM p = unbiased_qubit_povm(0.3, 0.1, 0.4);
        std::vector<double> vals;
        for (int i = 0; i < 100; ++i) {
            State s{Operator(rng.random_density(2))};
            vals.push_back(ozawa_error(s, target, p));
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= double(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        double stdev = std::sqrt(var / double(vals.size() - 1));
        REQUIRE(stdev <= 1e-12);
        REQUIRE_THAT(mean, WithinAbs(std::sqrt(2.0 * (1.0 - 0.4)), 1e-12));
    }
}

TEST_CASE("sign-flipped grid readout carries full error", "[noise-metrics]") {
    // Measuring -X instead of X: identical outcome statistics for symmetric
    // states, yet the error is the full 2·sqrt(<X^2>).
    const auto support = grid_positions_symmetric(4);
    Observable x = grid_position(support);
    std::vector<double> flipped(support.size());
    for (size_t i = 0; i < support.size(); ++i) flipped[i] = -support[i];
    DiscretePOVM p = spectral_povm(Observable::diagonal(flipped));

    SECTION("uniform state") {
        State s = State::maximally_mixed(4);
        double expected = 2.0 * std::sqrt(2.5);
        REQUIRE_THAT(ozawa_error(s, x, p), WithinAbs(expected, 1e-12));
        REQUIRE_THAT(three_state_error(s, x, p), WithinAbs(expected, 1e-10));
    }
    SECTION("mirror-symmetric pure state") {
        Vector psi(4);
        psi << 1.0, 2.0, 2.0, 1.0;
        State s = State::pure(psi);
        double second_moment = (1.0 * 4.0 + 4.0 * 1.0 + 4.0 * 1.0 + 1.0 * 4.0) / 10.0;
        REQUIRE_THAT(ozawa_error(s, x, p), WithinAbs(2.0 * std::sqrt(second_moment), 1e-12));
    }
}

TEST_CASE("moment route matches the dilated evaluation", "[noise-metrics]") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        int d1 = 2 + int(rng.raw() % 3);
        int d2 = 2 + int(rng.raw() % 3);
        MeasurementModel m = helpers::random_model(rng, d1, d2);
        State s{Operator(rng.random_density(d1))};
        Observable a{Operator(rng.random_hermitian(d1))};
        Observable b{Operator(rng.random_hermitian(d1))};

        double eps = ozawa_error(s, a, model_to_povm(m));
        REQUIRE_THAT(ozawa_error_dilated(s, m, a), WithinAbs(eps, 1e-10));

        double eta = ozawa_disturbance(s, b, model_to_channel(m));
        REQUIRE_THAT(ozawa_disturbance_dilated(s, m, b), WithinAbs(eta, 1e-10));

        REQUIRE(ozawa_error_sq(s, a, model_to_povm(m)) >= 0.0);
        REQUIRE(ozawa_disturbance_sq(s, b, model_to_channel(m)) >= 0.0);
    }
}

TEST_CASE("decoupled pointer reads a constant", "[noise-metrics]") {
    // Identity coupling with the probe parked in the pointer eigenstate of
    // value 2: every run reports 2, so the error is sqrt(<(2 - A)^2>).
    Rng rng(41);
    Vector probe_vec = Vector::Zero(2);
    probe_vec[1] = 1.0;
    MeasurementModel m(State::pure(probe_vec), Operator::identity(6),
                       Observable::diagonal({-0.5, 2.0}));
    Observable a{Operator(rng.random_hermitian(3))};
    State s{Operator(rng.random_density(3))};
    Matrix shifted = 2.0 * Matrix::Identity(3, 3) - a.matrix();
    double expected = std::sqrt(s.expectation(shifted * shifted));
    REQUIRE_THAT(ozawa_error_dilated(s, m, a), WithinAbs(expected, 1e-12));
    REQUIRE_THAT(ozawa_error(s, a, model_to_povm(m)), WithinAbs(expected, 1e-12));
}

TEST_CASE("swap readout of a target eigenstate is exact", "[noise-metrics]") {
    Rng rng(42);
    Observable a{Operator(rng.random_hermitian(3))};
    // probe preloaded with the eigenstate of value a_k; input the same eigenstate
    EigenSystem es = eigh(a.matrix());
    State probe = State::pure(es.vectors.col(1));
    MeasurementModel m(probe, Operator(helpers::swap_unitary(3)), a);
    State s = State::pure(es.vectors.col(1));
    REQUIRE(ozawa_error_dilated(s, m, a) == 0.0);
}

TEST_CASE("state change view of disturbance", "[noise-metrics]") {
    Rng rng(51);
    Observable b{Operator(rng.random_hermitian(3))};

    SECTION("identity channel is silent") {
        QuantumChannel id_channel{{Matrix::Identity(3, 3)}};
        for (int i = 0; i < 5; ++i) {
            State s{Operator(rng.random_density(3))};
            REQUIRE(ozawa_disturbance_sq(s, b, id_channel) == 0.0);
        }
    }

    SECTION("constant channel disturbs its own fixed point") {
        Vector psi = rng.random_unit_vector(3);
        QuantumChannel c = constant_channel(psi);
        State fixed = State::pure(psi);
        double var = fixed.expectation(b.matrix() * b.matrix()) -
                     std::pow(fixed.expectation(b.matrix()), 2);
        // input equals output, yet eta stays strictly positive
        REQUIRE(max_abs_diff(c.apply(fixed.density()), fixed.density()) < 1e-12);
        REQUIRE_THAT(ozawa_disturbance(fixed, b, c), WithinAbs(std::sqrt(2.0 * var), 1e-12));
        REQUIRE(ozawa_disturbance(fixed, b, c) > 0.1);

        // general input: spread about the repreparation mean plus the fixed
        // point's own spread
        State s{Operator(rng.random_density(3))};
        double mean = fixed.expectation(b.matrix());
        Matrix centered = b.matrix() - mean * Matrix::Identity(3, 3);
        double expected_sq = var + s.expectation(centered * centered);
        REQUIRE_THAT(ozawa_disturbance_sq(s, b, c), WithinAbs(expected_sq, 1e-12));
    }
}

TEST_CASE("three-state reconstruction agrees with the operator form", "[noise-metrics]") {
    SECTION("random triples") {
        Rng rng(61);
        for (int trial = 0; trial < 100; ++trial) {
            int d1 = 2 + int(rng.raw() % 3);
            int d2 = 2 + int(rng.raw() % 3);
            DiscretePOVM p = model_to_povm(helpers::random_model(rng, d1, d2));
            State s{Operator(rng.random_density(d1))};
            Observable a{Operator(rng.random_hermitian(d1))};
            REQUIRE_THAT(three_state_error(s, a, p), WithinAbs(ozawa_error(s, a, p), 1e-10));
        }
    }
    SECTION("sharp case sits at the cancellation floor") {
        // the statistical route loses ~1e-15 of absolute accuracy on eps^2,
        // so an exactly-zero error resolves only to ~1e-8 here
        Observable x = Observable::diagonal({-2.0, -1.0, 1.0, 2.0});
        State s = State::maximally_mixed(4);
        REQUIRE(three_state_error(s, x, spectral_povm(x)) <= 1e-7);
    }
    SECTION("degenerate shifted state exercises the vanishing-trace guard") {
        Observable a{Operator(Matrix(Eigen::Vector2cd(-1.0, 1.0).asDiagonal()))};
        Vector ground = Vector::Zero(2);
        ground[0] = 1.0;
        State s = State::pure(ground);  // (1+A)ρ(1+A) has trace 0
        DiscretePOVM p = unbiased_qubit_povm(0.2, 0.5, -0.3);
        REQUIRE_THAT(three_state_error(s, a, p), WithinAbs(ozawa_error(s, a, p), 1e-10));
    }
}

TEST_CASE("product check flags honest violations", "[noise-metrics]") {
    SECTION("measure-and-reprepare forces the product to zero") {
        // amplitudes of ψ are exact binary fractions, so the model reduction
        // stays bitwise clean and epsilon lands on exactly 0
        Vector psi(4);
        psi << 0.5, 0.5, 0.5, -0.5;
        const auto support = grid_positions_centered(4);
        MeasurementModel m = reprepare_model(psi, support);
        State s = State::pure(psi);
        NoiseReport r = product_check(s, m, grid_position(support), grid_momentum(support), 0.5);
        REQUIRE(r.epsilon == 0.0);
        REQUIRE(r.raw_epsilon_sq == 0.0);
        REQUIRE(r.eta > 0.5);
        REQUIRE(r.product == 0.0);
        REQUIRE(r.violated);
    }

    SECTION("decoupled probe: large error, zero disturbance") {
        Vector ground = Vector::Zero(2);
        ground[0] = 1.0;
        MeasurementModel m(State::pure(ground), Operator::identity(4),
                           Observable::diagonal({1.0, -1.0}));
        Observable a{Operator(helpers::pauli_x())};
        Observable b{Operator(helpers::pauli_z())};
        NoiseReport r = product_check(State::maximally_mixed(2), m, a, b, 0.5);
        REQUIRE_THAT(r.epsilon, WithinAbs(std::sqrt(2.0), 1e-12));
        REQUIRE(r.eta == 0.0);
        REQUIRE(r.product == 0.0);
        REQUIRE(r.violated);
    }

    SECTION("faithful momentum readout keeps the product above the bound") {
        // swap the probe in, Fourier-read it out: a sharp momentum measurement
        // with a fresh vacuum handed back. Both error and disturbance are near
        // 1, so the product clears 1/2 with a wide margin.
        const auto support = grid_positions_centered(8);
        const Matrix g = grid_fourier(support);
        Matrix u = kron(Matrix::Identity(8, 8), g.adjoint()) * helpers::swap_unitary(8);
        std::vector<double> momentum_values(support.size());
        for (size_t i = 0; i < support.size(); ++i)
            momentum_values[i] = 2.0 * M_PI * support[i] / 8.0;
        MeasurementModel m(grid_vacuum(support), Operator(std::move(u)),
                           Observable::diagonal(momentum_values));

        DiscretePOVM p = model_to_povm(m);
        REQUIRE(max_abs_diff(moment_operator(p, 1).entries(), grid_momentum(support).matrix()) <
                1e-12);

        State vac = grid_vacuum(support);
        NoiseReport r = product_check(vac, m, grid_position(support), grid_momentum(support), 0.5);
        REQUIRE_THAT(r.epsilon, WithinAbs(1.0, 0.05));
        REQUIRE_THAT(r.eta, WithinAbs(1.0, 0.05));
        REQUIRE(r.product >= 0.9);
        REQUIRE_FALSE(r.violated);
        REQUIRE_THAT(r.product, WithinAbs(r.epsilon * r.eta, 1e-12));
    }
}

TEST_CASE("noise report serializes with fixed key order", "[noise-metrics]") {
    NoiseReport r{1.5, 0.25, 0.375, 0.5, true, 2.25, 0.0625};
    REQUIRE(noise_report_to_json(r) ==
            "{\"epsilon\": 1.5, \"eta\": 0.25, \"product\": 0.375, \"bound\": 0.5, "
            "\"violated\": true, \"raw_epsilon_sq\": 2.25, \"raw_eta_sq\": 0.0625}");
}

TEST_CASE("noise metric dimension checks", "[noise-metrics]") {
    Observable z{Operator(helpers::pauli_z())};
    State s = State::maximally_mixed(3);
    REQUIRE_THROWS_AS(ozawa_error(s, z, spectral_povm(z)), std::invalid_argument);
    Matrix widen = Matrix::Zero(3, 2);
    widen(0, 0) = 1.0;
    widen(1, 1) = 1.0;
    QuantumChannel embed{{widen}};
    Observable b3{Operator(Matrix(Eigen::Vector3cd(0.0, 1.0, 2.0).asDiagonal()))};
    REQUIRE_THROWS_AS(ozawa_disturbance(State::maximally_mixed(2), b3, embed),
                      std::invalid_argument);
}
