#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace mumetrics;
using Catch::Matchers::WithinAbs;
using helpers::max_abs_diff;

TEST_CASE("tensor product", "[operator-core]") {
    SECTION("identity times identity") {
        Operator t = tensor(Operator::identity(2), Operator::identity(3));
        REQUIRE(max_abs_diff(t.entries(), Matrix::Identity(6, 6)) == 0.0);
    }
    SECTION("diagonal algebra") {
        Operator a{Matrix(Eigen::Vector2cd(1, 2).asDiagonal())};
        Operator b{Matrix(Eigen::Vector2cd(1, -1).asDiagonal())};
        Matrix expected = Eigen::Vector4cd(1, -1, 2, -2).asDiagonal();
        REQUIRE(max_abs_diff(tensor(a, b).entries(), expected) == 0.0);
    }
    SECTION("trace is multiplicative") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix a = rng.ginibre(2, 2);
            Matrix b = rng.ginibre(2, 2);
            complex_t lhs = kron(a, b).trace();
            complex_t rhs = a.trace() * b.trace();
            REQUIRE_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("partial trace", "[operator-core]") {
    Rng rng(12);
    SECTION("round-trips through tensor") {
        for (int trial = 0; trial < 10; ++trial) {
            Matrix a = rng.ginibre(3, 3);
            Matrix b = rng.ginibre(2, 2);
            Matrix kept = partial_trace(kron(a, b), 3, 2, Keep::first);
            REQUIRE(max_abs_diff(kept, b.trace() * a) < 1e-12);
            Matrix kept2 = partial_trace(kron(a, b), 3, 2, Keep::second);
            REQUIRE(max_abs_diff(kept2, a.trace() * b) < 1e-12);
        }
    }
    SECTION("identity splits") {
        Matrix kept = partial_trace(Matrix::Identity(4, 4), 2, 2, Keep::first);
        REQUIRE(max_abs_diff(kept, 2.0 * Matrix::Identity(2, 2)) == 0.0);
    }
    SECTION("maximally entangled pair reduces to the chaotic state") {
        Vector bell = Vector::Zero(4);
        bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
        Matrix rho = bell * bell.adjoint();
        Matrix kept = partial_trace(rho, 2, 2, Keep::first);
        REQUIRE(max_abs_diff(kept, 0.5 * Matrix::Identity(2, 2)) < 1e-15);
    }
    SECTION("dimension mismatch throws") {
        REQUIRE_THROWS_AS(partial_trace(Matrix::Identity(6, 6), 2, 2, Keep::first),
                          std::invalid_argument);
    }
}

TEST_CASE("observable spectral data", "[operator-core]") {
    SECTION("diagonal constructor keeps exact projectors") {
        Observable x = Observable::diagonal({-2, -1, 1, 2});
        REQUIRE(x.eigenvalues() == std::vector<double>{-2, -1, 1, 2});
        REQUIRE(x.projectors()[0](0, 0) == complex_t(1.0, 0.0));
    }
    SECTION("degenerate values merge into one projector") {
        Observable a = Observable::diagonal({1, 1, 2});
        REQUIRE(a.eigenvalues() == std::vector<double>{1, 2});
        Matrix expected = Matrix::Zero(3, 3);
        expected(0, 0) = expected(1, 1) = 1.0;
        REQUIRE(max_abs_diff(a.projectors()[0], expected) == 0.0);
    }
    SECTION("eigendecomposition path recombines") {
        Rng rng(13);
        for (int trial = 0; trial < 10; ++trial) {
            Matrix h = rng.random_hermitian(5);
            Observable obs{Operator(h)};
            Matrix recombined = Matrix::Zero(5, 5);
            for (size_t k = 0; k < obs.eigenvalues().size(); ++k)
                recombined += obs.eigenvalues()[k] * obs.projectors()[k];
            REQUIRE(max_abs_diff(recombined, hermitize(h)) < 1e-10);
        }
    }
    SECTION("degenerate spectrum from a rotated projector") {
        Rng rng(14);
        Matrix u = rng.haar_unitary(4);
        Matrix proj = Matrix::Zero(4, 4);
        proj(0, 0) = proj(1, 1) = 1.0;
        Observable obs{Operator(u * proj * u.adjoint())};
        REQUIRE(obs.eigenvalues().size() == 2);
        REQUIRE_THAT(obs.projectors()[1].trace().real(), WithinAbs(2.0, 1e-10));
    }
    SECTION("non-Hermitian input throws") {
        Matrix skew(2, 2);
        skew << 0, 1, -1, 0;
        REQUIRE_THROWS_AS(Observable{Operator(skew)}, std::invalid_argument);
    }
}

TEST_CASE("model_to_povm", "[operator-core]") {
    SECTION("identity coupling reads only the probe") {
        Vector e0 = Vector::Zero(2);
        e0[0] = 1.0;
        MeasurementModel m{State::pure(e0), Operator::identity(4),
                           Observable{Operator(helpers::pauli_z())}};
        DiscretePOVM p = model_to_povm(m);
        REQUIRE(p.outcomes() == std::vector<double>{-1, 1});
        REQUIRE(max_abs_diff(p.effects()[0], Matrix::Zero(2, 2)) < 1e-12);
        REQUIRE(max_abs_diff(p.effects()[1], Matrix::Identity(2, 2)) < 1e-12);
    }
    SECTION("swap coupling measures the system sharply") {
        Rng rng(15);
        MeasurementModel m{State{Operator(rng.random_density(2))},
                           Operator(helpers::swap_unitary(2)),
                           Observable{Operator(helpers::pauli_z())}};
        DiscretePOVM p = model_to_povm(m);
        Observable z{Operator(helpers::pauli_z())};
        REQUIRE(max_abs_diff(p.effects()[0], z.projectors()[0]) < 1e-10);
        REQUIRE(max_abs_diff(p.effects()[1], z.projectors()[1]) < 1e-10);
    }
    SECTION("effects always sum to identity") {
        Rng rng(16);
        for (int trial = 0; trial < 10; ++trial) {
            MeasurementModel m = helpers::random_model(rng, 3, 2);
            DiscretePOVM p = model_to_povm(m);
            Matrix sum = Matrix::Zero(3, 3);
            for (const Matrix& e : p.effects()) sum += e;
            REQUIRE(max_abs_diff(sum, Matrix::Identity(3, 3)) < 1e-10);
        }
    }
}

TEST_CASE("model_to_channel", "[operator-core]") {
    Rng rng(17);
    SECTION("identity coupling gives the identity map") {
        MeasurementModel m{State{Operator(rng.random_density(3))}, Operator::identity(6),
                           Observable{Operator(rng.random_hermitian(3))}};
        QuantumChannel c = model_to_channel(m);
        Matrix rho = rng.random_density(2);
        REQUIRE(max_abs_diff(c.apply(rho), rho) < 1e-12);
    }
    SECTION("swap coupling outputs the probe") {
        Matrix sigma = rng.random_density(2);
        MeasurementModel m{State{Operator(sigma)}, Operator(helpers::swap_unitary(2)),
                           Observable{Operator(helpers::pauli_z())}};
        QuantumChannel c = model_to_channel(m);
        for (int trial = 0; trial < 5; ++trial)
            REQUIRE(max_abs_diff(c.apply(rng.random_density(2)), sigma) < 1e-12);
    }
}

TEST_CASE("random-model reductions match the joint-state oracle", "[operator-core]") {
    Rng rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        int d1 = 2 + int(rng.raw() % 3);
        int d2 = 2 + int(rng.raw() % 3);
        MeasurementModel m = helpers::random_model(rng, d1, d2);
        State s{Operator(rng.random_density(d1))};

        DiscretePOVM p = model_to_povm(m);
        Distribution reduced = outcome_distribution(p, s);
        std::vector<double> direct = helpers::pointer_probs_direct(m, s);
        REQUIRE(reduced.size() == direct.size());
        for (size_t i = 0; i < direct.size(); ++i)
            REQUIRE_THAT(reduced.probs()[i], WithinAbs(direct[i], 1e-10));

        QuantumChannel c = model_to_channel(m);
        // direct channel evaluation: trace out the probe after the interaction
        const Matrix& u = m.coupling().entries();
        Matrix joint = u * kron(s.density(), m.probe().density()) * u.adjoint();
        Matrix direct_out = partial_trace(joint, d1, d2, Keep::first);
        REQUIRE(max_abs_diff(c.apply(s.density()), direct_out) < 1e-10);
        REQUIRE(min_eigenvalue(hermitize(helpers::choi_matrix(c))) > -1e-10);
    }
}

TEST_CASE("moment operators", "[operator-core]") {
    Rng rng(19);
    SECTION("zeroth moment is the identity") {
        MeasurementModel m = helpers::random_model(rng, 3, 3);
        DiscretePOVM p = model_to_povm(m);
        REQUIRE(max_abs_diff(moment_operator(p, 0).entries(), Matrix::Identity(3, 3)) < 1e-10);
    }
    SECTION("first moment of a spectral POVM is the operator") {
        Matrix h = rng.random_hermitian(4);
        Observable obs{Operator(h)};
        DiscretePOVM p = spectral_povm(obs);
        REQUIRE(max_abs_diff(moment_operator(p, 1).entries(), obs.matrix()) < 1e-12);
    }
    SECTION("unbiased qubit second moment is the identity") {
        Matrix plus = 0.5 * (Matrix::Identity(2, 2) + 0.7 * helpers::pauli_x());
        Matrix minus = Matrix::Identity(2, 2) - plus;
        DiscretePOVM p({-1.0, 1.0}, {minus, plus});
        REQUIRE(max_abs_diff(moment_operator(p, 2).entries(), Matrix::Identity(2, 2)) < 1e-14);
    }
    SECTION("unsupported power throws") {
        Observable obs = Observable::diagonal({0, 1});
        REQUIRE_THROWS_AS(moment_operator(spectral_povm(obs), 5), std::invalid_argument);
    }
}

TEST_CASE("outcome distributions", "[operator-core]") {
    SECTION("eigenstate of a sharp observable gives a point mass") {
        Observable x = Observable::diagonal({-2, -1, 1, 2});
        Vector e2 = Vector::Zero(4);
        e2[2] = 1.0;
        Distribution d = outcome_distribution(spectral_povm(x), State::pure(e2));
        REQUIRE(d.probs() == std::vector<double>{0, 0, 1, 0});
    }
    SECTION("unbiased qubit statistics") {
        double cx = 0.3, cz = -0.5;
        Matrix plus = 0.5 * (Matrix::Identity(2, 2) + helpers::bloch_matrix(cx, 0, cz));
        DiscretePOVM p({-1.0, 1.0}, {Matrix::Identity(2, 2) - plus, plus});
        double rx = 0.2, rz = 0.9;
        State s{Operator(0.5 * (Matrix::Identity(2, 2) + helpers::bloch_matrix(rx, 0, rz)))};
        Distribution d = outcome_distribution(p, s);
        double dot = cx * rx + cz * rz;
        REQUIRE_THAT(d.probs()[1], WithinAbs(0.5 * (1 + dot), 1e-12));
        REQUIRE_THAT(d.probs()[0], WithinAbs(0.5 * (1 - dot), 1e-12));
    }
    SECTION("coin flip ignores the state") {
        DiscretePOVM p({0.0, 1.0},
                       {0.5 * Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)});
        Distribution d = outcome_distribution(p, State::maximally_mixed(2));
        REQUIRE_THAT(d.probs()[0], WithinAbs(0.5, 1e-15));
    }
}

TEST_CASE("heisenberg picture", "[operator-core]") {
    Rng rng(20);
    SECTION("identity channel fixes every operator") {
        QuantumChannel c{{Matrix::Identity(3, 3)}};
        Matrix x = rng.random_hermitian(3);
        REQUIRE(max_abs_diff(heisenberg_apply(c, Operator(x)).entries(), x) == 0.0);
    }
    SECTION("constant channel collapses to a trace functional") {
        Matrix rho0 = rng.random_density(3);
        EigenSystem es = eigh(rho0);
        std::vector<Matrix> kraus;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Matrix k = std::sqrt(es.values[i]) * es.vectors.col(i) *
                           Matrix::Identity(3, 3).row(j);
                kraus.push_back(k);
            }
        QuantumChannel c{kraus};
        Matrix x = rng.random_hermitian(3);
        Matrix expected = (rho0 * x).trace() * Matrix::Identity(3, 3);
        REQUIRE(max_abs_diff(c.heisenberg(x), expected) < 1e-12);
    }
    SECTION("channels are unital in the Heisenberg picture") {
        MeasurementModel m = helpers::random_model(rng, 2, 4);
        QuantumChannel c = model_to_channel(m);
        REQUIRE(max_abs_diff(c.heisenberg(Matrix::Identity(2, 2)), Matrix::Identity(2, 2)) < 1e-10);
    }
}

TEST_CASE("validation rejects malformed objects", "[operator-core]") {
    SECTION("state with negative eigenvalue") {
        REQUIRE_THROWS_AS(State{Operator(Matrix(Eigen::Vector2cd(1.5, -0.5).asDiagonal()))},
                          std::invalid_argument);
    }
    SECTION("povm effects not resolving identity") {
        Matrix half = 0.5 * Matrix::Identity(2, 2);
        REQUIRE_THROWS_AS(DiscretePOVM({0.0, 1.0}, {half, 0.4 * Matrix::Identity(2, 2)}),
                          std::invalid_argument);
    }
    SECTION("non-unitary coupling") {
        REQUIRE_THROWS_AS(
            MeasurementModel(State::maximally_mixed(2), Operator(0.5 * Matrix::Identity(4, 4)),
                             Observable{Operator(helpers::pauli_z())}),
            std::invalid_argument);
    }
    SECTION("channel not trace-preserving") {
        REQUIRE_THROWS_AS(QuantumChannel{{0.5 * Matrix::Identity(2, 2)}}, std::invalid_argument);
    }
}

TEST_CASE("operator json embedding", "[operator-core]") {
    Matrix m(2, 2);
    m << complex_t(1, 0), complex_t(0, -1), complex_t(0, 1), complex_t(-1, 0);
    std::string json = operator_to_json(Operator(m));
    REQUIRE(json ==
            "{\"dim\": 2, \"entries\": [[1, 0], [0, -1], [0, 1], [-1, 0]]}");
}
