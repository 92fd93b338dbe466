#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#include "gme/propagator.hpp"
#include "gme/quadratic_model.hpp"
#include "support/fock_oracle.hpp"

using namespace gme;
using testsupport::FockSpace;

namespace {

QuadraticModel two_dot_model(double eps1 = 0.5, double eps2 = 1.0, double delta = 0.7) {
    QuadraticModel m;
    m.n_modes = 2;
    m.hopping = Eigen::MatrixXcd::Zero(2, 2);
    m.hopping(0, 0) = eps1;
    m.hopping(1, 1) = eps2;
    m.pairing = Eigen::MatrixXcd::Zero(2, 2);
    m.pairing(0, 1) = delta;
    m.pairing(1, 0) = -delta;
    m.coupled_sites = {0, 1};
    return m;
}

}  // namespace

TEST_CASE("nambu matrix of decoupled modes has the bare energies") {
    QuadraticModel m = two_dot_model(0.5, 1.0, 0.0);
    const NambuMatrix nambu = build_nambu(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(nambu.bdg);
    Eigen::Vector4d expected(-1.0, -0.5, 0.5, 1.0);
    CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("nambu spectrum matches brute-force many-body level differences") {
    // Quasiparticle energies from the 4x4 Nambu eigensolve must reproduce the
    // spectrum gaps of the full Fock Hamiltonian.
    QuadraticModel m = two_dot_model();
    const BogoliubovData bog = diagonalize_bogoliubov(build_nambu(m), m.coupled_sites);

    FockSpace fock(2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fock.hamiltonian(m));
    const double e0 = es.eigenvalues()(0);
    // One-quasiparticle states sit at e0 + ω.
    std::vector<double> gaps;
    for (int i = 1; i < 4; ++i) gaps.push_back(es.eigenvalues()(i) - e0);
    std::sort(gaps.begin(), gaps.end());
    CHECK(bog.energies(0) == doctest::Approx(gaps[0]).epsilon(1e-12));
    CHECK(bog.energies(1) == doctest::Approx(gaps[1]).epsilon(1e-12));
    // Highest state carries both quasiparticles.
    CHECK(bog.energies(0) + bog.energies(1) == doctest::Approx(gaps[2]).epsilon(1e-12));
}

TEST_CASE("nambu spectrum is closed under negation for random models") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const QuadraticModel m = testsupport::random_model(rng, 1 + trial % 4);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(build_nambu(m).bdg);
        const Eigen::VectorXd ev = es.eigenvalues();
        const int d = static_cast<int>(ev.size());
        for (int k = 0; k < d; ++k)
            CHECK(ev(k) == doctest::Approx(-ev(d - 1 - k)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("model validation rejects malformed input") {
    QuadraticModel m = two_dot_model();
    m.hopping(0, 1) = 0.3;  // breaks Hermiticity
    CHECK_THROWS_AS(build_nambu(m), ValidationError);

    QuadraticModel bad_shape = two_dot_model();
    bad_shape.pairing = Eigen::MatrixXcd::Zero(3, 3);
    CHECK_THROWS_AS(build_nambu(bad_shape), ValidationError);

    QuadraticModel no_sites = two_dot_model();
    no_sites.coupled_sites.clear();
    CHECK_THROWS_AS(build_nambu(no_sites), ValidationError);
}

TEST_CASE("bogoliubov data without pairing is trivial") {
    QuadraticModel m = two_dot_model(0.5, 1.0, 0.0);
    const BogoliubovData bog = diagonalize_bogoliubov(build_nambu(m), {0, 1});
    CHECK((bog.u - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(bog.v.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(bog.chi.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(bog.energies(0) == doctest::Approx(0.5));
    CHECK(bog.energies(1) == doctest::Approx(1.0));
}

TEST_CASE("bogoliubov transformation is unitary and diagonalizing") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const QuadraticModel m = testsupport::random_model(rng, 1 + trial % 4);
        const NambuMatrix nambu = build_nambu(m);
        BogoliubovData bog;
        try {
            bog = diagonalize_bogoliubov(nambu, m.coupled_sites);
        } catch (const NumericalError&) {
            continue;  // near-zero quasiparticle energy, legitimately flagged
        }
        const Eigen::MatrixXcd u = bog.unitary();
        const int d = static_cast<int>(u.rows());
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <
              1e-12);
        Eigen::MatrixXcd diag = u.adjoint() * nambu.bdg * u;
        for (int k = 0; k < d / 2; ++k) {
            CHECK(diag(k, k).real() == doctest::Approx(bog.energies(k)).epsilon(1e-10));
            CHECK(diag(d / 2 + k, d / 2 + k).real() ==
                  doctest::Approx(-bog.energies(k)).epsilon(1e-10));
        }
        diag.diagonal().setZero();
        CHECK(diag.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("coupling vectors satisfy the anticommutation sum rule") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const QuadraticModel m = testsupport::random_model(rng, 1 + trial % 4);
        BogoliubovData bog;
        try {
            bog = diagonalize_bogoliubov(build_nambu(m), m.coupled_sites);
        } catch (const NumericalError&) {
            continue;
        }
        const double sum = bog.phi.squaredNorm() + bog.chi.squaredNorm();
        CHECK(sum == doctest::Approx(static_cast<double>(m.coupled_sites.size()))
                         .epsilon(1e-10));
    }
}

TEST_CASE("fig-2 coupling vectors pass the sum rule") {
    QuadraticModel m = two_dot_model();
    const BogoliubovData bog = diagonalize_bogoliubov(build_nambu(m), {0, 1});
    CHECK(bog.phi.squaredNorm() + bog.chi.squaredNorm() == doctest::Approx(2.0));
}

TEST_CASE("majorana generator structure") {
    SUBCASE("real J and Delta leave block diagonals empty") {
        QuadraticModel m = two_dot_model();
        const MajoranaGenerator gen = majorana_generator(m);
        for (int i = 0; i < 4; i += 2) {
            for (int j = 0; j < 4; j += 2) {
                CHECK(std::abs(gen.h(i, j)) < 1e-15);
                CHECK(std::abs(gen.h(i + 1, j + 1)) < 1e-15);
            }
        }
    }
    SUBCASE("pure imaginary antisymmetric for random models") {
        std::mt19937 rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            const QuadraticModel m = testsupport::random_model(rng, 1 + trial % 4);
            const MajoranaGenerator gen = majorana_generator(m);
            CHECK((gen.h + gen.h.transpose()).cwiseAbs().maxCoeff() < 1e-14);
            CHECK(gen.h.real().cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("free-mode heisenberg flow from the generator") {
    // Single mode J = ε: w(t) = e^{-2iht} w rotates so that a(t) = e^{-iεt} a
    // and the occupation is untouched.
    QuadraticModel m;
    m.n_modes = 1;
    m.hopping = Eigen::MatrixXcd::Constant(1, 1, 0.8);
    m.pairing = Eigen::MatrixXcd::Zero(1, 1);
    m.coupled_sites = {0};
    const MajoranaGenerator gen = majorana_generator(m);

    const double t = 1.37;
    const Eigen::Matrix2cd flow = (complexd(0, -2.0) * gen.h * t).exp();
    // Coefficients of a = (w_1 + i w_2)/√2 evolve with the transposed flow.
    Eigen::Vector2cd coeff(1.0 / std::sqrt(2.0), complexd(0, 1.0) / std::sqrt(2.0));
    const Eigen::Vector2cd evolved = flow.transpose() * coeff;
    const complexd expected = std::polar(1.0, -0.8 * t);
    CHECK(std::abs(evolved(0) - expected / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(evolved(1) - complexd(0, 1.0) * expected / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("gamma-zero covariance flow matches the fock oracle") {
    // Calibration of the generator normalization: exact closed-system flow
    // Γ(t) = e^{Xt} Γ(0) e^{Xᵀt}, X = -2ih, against brute-force evolution.
    std::mt19937 rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + trial % 3;
        const QuadraticModel m = testsupport::random_model(rng, n);
        const MajoranaGenerator gen = majorana_generator(m);
        FockSpace fock(n);
        const StateSpec spec = (n >= 2 && trial % 2 == 0) ? StateSpec::BellPair
                                                          : StateSpec::FullyOccupied;
        const Eigen::VectorXcd psi0 = fock.state(spec);
        const TimeGrid grid(10.0, 40);
        const Eigen::MatrixXd expected = evolve_populations(fock, m, psi0, grid);

        const Eigen::MatrixXcd gamma0 = initial_covariance(spec, n);
        double worst = 0.0;
        for (int i = 0; i < grid.points(); ++i) {
            const Eigen::MatrixXcd flow =
                (complexd(0, -2.0) * gen.h * grid.time(i)).exp();
            const Eigen::MatrixXcd gamma = flow * gamma0 * flow.transpose();
            const Eigen::VectorXd pops = populations(gamma);
            worst = std::max(worst,
                             (pops - expected.row(i).transpose()).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("interaction coefficients at t = 0 reproduce the coupling operator") {
    QuadraticModel m;
    m.n_modes = 1;
    m.hopping = Eigen::MatrixXcd::Constant(1, 1, 0.6);
    m.pairing = Eigen::MatrixXcd::Zero(1, 1);
    m.coupled_sites = {0};
    const BogoliubovData bog = diagonalize_bogoliubov(build_nambu(m), {0});
    const Eigen::MatrixXcd a = interaction_coefficients(bog, 0.0);
    // A† = (w_1 - i w_2)/√2.
    CHECK(std::abs(a(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(a(0, 1) + complexd(0, 1.0) / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("interaction coefficient rows are conjugate and norm-preserving") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const QuadraticModel m = testsupport::random_model(rng, 1 + trial % 4);
        BogoliubovData bog;
        try {
            bog = diagonalize_bogoliubov(build_nambu(m), m.coupled_sites);
        } catch (const NumericalError&) {
            continue;
        }
        for (double t : {-2.3, 0.0, 0.7, 4.1}) {
            const Eigen::MatrixXcd a = interaction_coefficients(bog, t);
            CHECK((a.row(1) - a.row(0).conjugate()).cwiseAbs().maxCoeff() < 1e-12);
            // {A†(t), A(t)} = Σ_p |A_{0p}|² stays at |coupled set|.
            CHECK(a.row(0).squaredNorm() ==
                  doctest::Approx(static_cast<double>(m.coupled_sites.size()))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("interaction coefficients match the fock-space interaction picture") {
    QuadraticModel m = two_dot_model();
    const BogoliubovData bog = diagonalize_bogoliubov(build_nambu(m), {0, 1});
    FockSpace fock(2);
    for (double t : {0.0, 0.5, 1.0, -1.3}) {
        const Eigen::MatrixXcd expected =
            testsupport::interaction_coefficients_bruteforce(fock, m, t);
        const Eigen::MatrixXcd actual = interaction_coefficients(bog, t);
        CHECK((expected - actual).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("named initial covariances") {
    SUBCASE("vacuum and occupied single mode") {
        const Eigen::MatrixXcd vac = initial_covariance(StateSpec::Vacuum, 1);
        CHECK(vac(0, 1) == complexd(0, 1));
        CHECK(populations(vac)(0) == doctest::Approx(0.0));
        const Eigen::MatrixXcd occ = initial_covariance(StateSpec::FullyOccupied, 1);
        CHECK(occ(0, 1) == complexd(0, -1));
        CHECK(populations(occ)(0) == doctest::Approx(1.0));
    }
    SUBCASE("bell pair matches the brute-force expectation values") {
        FockSpace fock(2);
        const Eigen::MatrixXcd expected = fock.covariance(fock.state(StateSpec::BellPair));
        const Eigen::MatrixXcd actual = initial_covariance(StateSpec::BellPair, 2);
        CHECK((expected - actual).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(populations(actual)(0) == doctest::Approx(0.5));
        CHECK(populations(actual)(1) == doctest::Approx(0.5));
    }
    SUBCASE("explicit matrices are validated") {
        Eigen::MatrixXcd good = initial_covariance(StateSpec::Vacuum, 2);
        CHECK_NOTHROW(initial_covariance(good));
        Eigen::MatrixXcd bad = good;
        bad(0, 1) = complexd(0, 2.0);  // spectrum outside [-1, 1]
        bad(1, 0) = complexd(0, -2.0);
        CHECK_THROWS_AS(initial_covariance(bad), ValidationError);
        Eigen::MatrixXcd real_entries = good;
        real_entries(0, 1) = 0.5;
        CHECK_THROWS_AS(initial_covariance(real_entries), ValidationError);
    }
}

TEST_CASE("degenerate quasiparticle energies are flagged") {
    // J = 0 makes every quasiparticle energy vanish.
    QuadraticModel m;
    m.n_modes = 1;
    m.hopping = Eigen::MatrixXcd::Zero(1, 1);
    m.pairing = Eigen::MatrixXcd::Zero(1, 1);
    m.coupled_sites = {0};
    CHECK_THROWS_AS(diagonalize_bogoliubov(build_nambu(m), {0}), NumericalError);
}
