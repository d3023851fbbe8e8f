#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scqed/fock.hpp"

using namespace scqed;
using Eigen::MatrixXd;

namespace {
// independent oracle: coherent-state coefficients by direct series summation
double coherent_coeff(double theta, int n) {
    double log_term = -0.5 * theta * theta + n * std::log(std::abs(theta)) - 0.5 * std::lgamma(n + 1.0);
    double sign = (theta < 0 && n % 2 != 0) ? -1.0 : 1.0;
    return sign * std::exp(log_term);
}
}  // namespace

TEST_CASE("ladder operators at the smallest size") {
    auto [a, ad, n] = ladder_operators({2, 0});
    MatrixXd expect(2, 2);
    expect << 0, 1, 0, 0;
    REQUIRE((a - expect).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((ad - expect.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("canonical commutator holds away from the cutoff") {
    auto [a, ad, n] = ladder_operators({4, 1});
    MatrixXd comm = a * ad - ad * a;
    REQUIRE((comm - MatrixXd::Identity(4, 4)).topLeftCorner(3, 3).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("N = a^dag a on the leading block") {
    FockTruncation tr{16, 1};
    auto [a, ad, n] = ladder_operators(tr);
    REQUIRE(((ad * a) - n).topLeftCorner(15, 15).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("FockTruncation validation") {
    REQUIRE_THROWS_AS((FockTruncation{1, 0}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS((FockTruncation{4, 4}).validate(), std::invalid_argument);
    REQUIRE_NOTHROW((FockTruncation{4, 3}).validate());
}

TEST_CASE("displacement at theta = 0 is the identity") {
    FockTruncation tr{8, 0};
    REQUIRE((displacement(tr, 0.0) - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("displacement column 0 is the coherent state") {
    FockTruncation tr{64, 0};
    MatrixXd d = displacement(tr, 0.5);
    for (int n = 0; n < 30; ++n)
        REQUIRE(d(n, 0) == Catch::Approx(coherent_coeff(0.5, n)).margin(1e-13));
}

TEST_CASE("displacement group inverse and unitarity") {
    FockTruncation tr{64, 8};
    MatrixXd d = displacement(tr, 0.7);
    REQUIRE((d * displacement(tr, -0.7) - MatrixXd::Identity(64, 64))
                .topLeftCorner(56, 56).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((d.transpose() * d - MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("displacement refuses unsound truncation") {
    REQUIRE_THROWS_AS(displacement({8, 0}, 3.0), std::domain_error);
    REQUIRE(displacement_trusted({64, 0}, 0.4, 10));
    REQUIRE_FALSE(displacement_trusted({4, 0}, 1.0, 3));
}

TEST_CASE("displaced diagonal element closed form vs matrix exponential") {
    FockTruncation tr{64, 0};
    for (double x : {0.25, 0.8, 1.4, 2.0}) {
        MatrixXd d = displacement(tr, x);
        for (int n = 0; n <= 10; ++n)
            REQUIRE(std::abs(d(n, n) - displaced_diag_element(n, x)) < 1e-10);
    }
}

TEST_CASE("displaced diagonal element symmetry under x -> -x") {
    for (int n : {0, 1, 2, 5, 9})
        for (double x : {0.3, 0.8, 1.7})
            REQUIRE(displaced_diag_element(n, x) == displaced_diag_element(n, -x));
}

TEST_CASE("displaced diagonal element trivial values") {
    REQUIRE(displaced_diag_element(0, 0.0) == 1.0);
    // n=2, x=0.8 against the expm oracle at dim = 64
    MatrixXd d = displacement({64, 0}, 0.8);
    REQUIRE(std::abs(displaced_diag_element(2, 0.8) - d(2, 2)) < 1e-10);
}

TEST_CASE("laguerre recurrence matches the explicit low-order polynomials") {
    for (double y : {0.0, 0.3, 1.7, 4.2}) {
        REQUIRE(laguerre(0, y) == 1.0);
        REQUIRE(laguerre(1, y) == Catch::Approx(1.0 - y).margin(1e-15));
        REQUIRE(laguerre(2, y) == Catch::Approx(1.0 - 2.0 * y + 0.5 * y * y).margin(1e-14));
        REQUIRE(laguerre(3, y) ==
                Catch::Approx(1.0 - 3.0 * y + 1.5 * y * y - y * y * y / 6.0).margin(1e-13));
    }
    // stays finite and modest at large n (recurrence, no factorials)
    REQUIRE(std::isfinite(laguerre(120, 0.16)));
}
