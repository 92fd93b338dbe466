#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "gme/oracle.hpp"
#include "gme/propagator.hpp"
#include "support/fock_oracle.hpp"

using namespace gme;

namespace {

QuadraticModel two_dot_model() {
    QuadraticModel m;
    m.n_modes = 2;
    m.hopping = Eigen::MatrixXcd::Zero(2, 2);
    m.hopping(0, 0) = 0.5;
    m.hopping(1, 1) = 1.0;
    m.pairing = Eigen::MatrixXcd::Zero(2, 2);
    m.pairing(0, 1) = 0.7;
    m.pairing(1, 0) = -0.7;
    m.coupled_sites = {0, 1};
    return m;
}

}  // namespace

TEST_CASE("discretized couplings carry the spectral-density cell mass") {
    const SpectralDensity sd{1.0, 1.5};
    const DiscreteBath bath = discretize_bath(sd, 400, 45.0);
    CHECK(bath.n_modes() == 400);
    CHECK(bath.spacing() == doctest::Approx(0.225));
    for (int r = 0; r < 400; r += 37) {
        CHECK(bath.couplings(r) * bath.couplings(r) ==
              doctest::Approx(sd.density(bath.frequencies(r)) * 0.225));
        CHECK(bath.couplings(r) >= 0.0);
    }
    // Total weight approaches c(0) = γλ/2 from below (window truncation).
    const double total = bath.couplings.squaredNorm();
    CHECK(total < 0.75);
    CHECK(total > 0.7);
}

TEST_CASE("decoupled bath has no couplings") {
    const DiscreteBath bath = discretize_bath(SpectralDensity{0.0, 1.5}, 50, 30.0);
    CHECK(bath.couplings.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recurrence horizon arithmetic") {
    const SpectralDensity sd{1.0, 1.5};
    const DiscreteBath bath = discretize_bath(sd, 400, 45.0);
    CHECK(recurrence_horizon(bath) == doctest::Approx(2.0 * M_PI / 0.225));
    const DiscreteBath doubled = discretize_bath(sd, 800, 45.0);
    CHECK(recurrence_horizon(doubled) ==
          doctest::Approx(2.0 * recurrence_horizon(bath)));
}

TEST_CASE("bath reconstruction error sits at the window-truncation floor") {
    // The Lorentzian tail beyond |ω| = W caps the fidelity at W = 30λ around
    // 2.1% of c(0), no matter how many modes resolve the window.
    const SpectralDensity sd{1.0, 1.5};
    const TimeGrid grid(10.0, 400);
    const double c0 = sd.correlation(0.0);
    const double rel400 =
        bath_reconstruction_error(discretize_bath(sd, 400, 45.0), sd, grid) / c0;
    const double rel800 =
        bath_reconstruction_error(discretize_bath(sd, 800, 45.0), sd, grid) / c0;
    CHECK(rel400 > 0.019);
    CHECK(rel400 < 0.024);
    CHECK(rel800 == doctest::Approx(rel400).epsilon(1e-2));
    // A wider window at the same mode density pushes the floor down.
    const double rel_wide =
        bath_reconstruction_error(discretize_bath(sd, 1334, 150.0), sd, grid) / c0;
    CHECK(rel_wide < 0.5 * rel400);
}

TEST_CASE("decoupled oracle reproduces the closed system exactly") {
    const QuadraticModel m = two_dot_model();
    const DiscreteBath bath = discretize_bath(SpectralDensity{0.0, 1.5}, 60, 30.0);
    const TimeGrid grid(6.0, 60);
    const Eigen::MatrixXcd gamma0 = initial_covariance(StateSpec::BellPair, 2);
    const OracleResult res = exact_evolve(m, bath, gamma0, grid);

    const MajoranaGenerator gen = majorana_generator(m);
    for (int i = 0; i < grid.points(); i += 6) {
        const Eigen::MatrixXcd flow = (complexd(0, -2.0) * gen.h * grid.time(i)).exp();
        const Eigen::MatrixXcd expected = flow * gamma0 * flow.transpose();
        CHECK((res.system_gammas[i] - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("full covariance stays physical along the exact flow") {
    const QuadraticModel m = two_dot_model();
    const DiscreteBath bath = discretize_bath(SpectralDensity{0.6, 1.5}, 24, 20.0);
    const Eigen::MatrixXcd gamma0 = initial_covariance(StateSpec::BellPair, 2);
    for (double t : {0.0, 0.7, 2.3}) {
        const Eigen::MatrixXcd full = exact_full_covariance(m, bath, gamma0, t);
        CHECK((full + full.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((full + full.conjugate()).cwiseAbs().maxCoeff() < 1e-9);
        const Eigen::VectorXd spec = covariance_spectrum(full);
        CHECK(spec.minCoeff() > -1.0 - 1e-9);
        CHECK(spec.maxCoeff() < 1.0 + 1e-9);
    }
}

TEST_CASE("oracle populations are stable under bath refinement") {
    // Doubling the mode count at fixed window, and widening the window at
    // fixed density, both leave the reduced trajectory in place.
    const QuadraticModel m = two_dot_model();
    const SpectralDensity sd{0.3, 1.5};
    const TimeGrid grid(3.0, 60);
    const Eigen::MatrixXcd gamma0 = initial_covariance(StateSpec::BellPair, 2);

    const OracleResult base =
        exact_evolve(m, discretize_bath(sd, 100, 45.0), gamma0, grid);
    const OracleResult denser =
        exact_evolve(m, discretize_bath(sd, 200, 45.0), gamma0, grid);
    CHECK((base.populations - denser.populations).cwiseAbs().maxCoeff() < 1e-3);

    const OracleResult wider =
        exact_evolve(m, discretize_bath(sd, 150, 67.5), gamma0, grid);
    CHECK((base.populations - wider.populations).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("oracle input validation") {
    const SpectralDensity sd{1.0, 1.5};
    CHECK_THROWS_AS(discretize_bath(sd, 1, 30.0), ValidationError);
    CHECK_THROWS_AS(discretize_bath(sd, 100, 0.0), ValidationError);
    const QuadraticModel m = two_dot_model();
    const DiscreteBath bath = discretize_bath(sd, 20, 10.0);
    const Eigen::MatrixXcd wrong = Eigen::MatrixXcd::Zero(6, 6);
    CHECK_THROWS_AS(exact_evolve(m, bath, wrong, TimeGrid(1.0, 10)), ValidationError);
}
