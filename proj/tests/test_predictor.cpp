#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nlmsa/eig_moments.hpp"
#include "nlmsa/errors.hpp"
#include "nlmsa/predictor.hpp"

using namespace nlmsa;

namespace {

std::vector<cplx> fig_weights() {
    return {cplx{0.227, 0.0}, cplx{0.460, 0.0}, cplx{0.688, 0.0}, cplx{0.460, 0.0},
            cplx{0.227, 0.0}};
}

FilterScenario fig_scenario(double mu) {
    return FilterScenario(fig_weights(), mu, 0.01, InputCovariance::toeplitz(5, 0.5));
}

CMatrix identity_walk(int m, double q) {
    CMatrix rq(m);
    for (int i = 0; i < m; ++i) rq(i, i) = cplx{q, 0.0};
    return rq;
}

}  // namespace

TEST_CASE("scenario construction validates its inputs") {
    const InputCovariance cov = InputCovariance::toeplitz(5, 0.5);
    CHECK_THROWS_AS(FilterScenario({}, 0.1, 0.01, cov), ValidationError);
    CHECK_THROWS_AS(FilterScenario({cplx{1, 0}, cplx{0, 0}}, 0.1, 0.01, cov), ValidationError);
    CHECK_THROWS_AS(FilterScenario(fig_weights(), 0.0, 0.01, cov), ValidationError);
    CHECK_THROWS_AS(FilterScenario(fig_weights(), -0.1, 0.01, cov), ValidationError);
    CHECK_THROWS_AS(FilterScenario(fig_weights(), 0.1, -1e-3, cov), ValidationError);
    CHECK_THROWS_AS(FilterScenario(fig_weights(), 0.1, 0.01, cov, identity_walk(4, 1e-6)),
                    ValidationError);
    CMatrix bad_walk = identity_walk(5, 1e-6);
    bad_walk(2, 2) = cplx{-1.0, 0.0};
    CHECK_THROWS_AS(FilterScenario(fig_weights(), 0.1, 0.01, cov, bad_walk), ValidationError);
}

TEST_CASE("learning curve starts at the quadratic form of the optimal weights") {
    const FilterScenario sc = fig_scenario(0.1);
    const LearningCurve emse = learning_curve(sc, 10, Measure::EMSE);
    const LearningCurve msd = learning_curve(sc, 10, Measure::MSD);
    REQUIRE(emse.values.size() == 10);
    CHECK(emse.kind == Measure::EMSE);
    CHECK(emse.source == CurveSource::Theory);

    // w starts at zero, so the initial error vector is w_opt itself:
    // EMSE[0] = sum lambda_k |wbar_k|^2 and MSD[0] = ||w_opt||^2.
    double quad = 0.0, norm2 = 0.0;
    for (size_t k = 0; k < emse.eigenvalues.size(); ++k) {
        quad += emse.eigenvalues[k] * std::norm(emse.w_opt_whitened[k]);
        norm2 += std::norm(sc.w_opt[k]);
    }
    CHECK(emse.values[0] == doctest::Approx(quad).epsilon(1e-13));
    CHECK(msd.values[0] == doctest::Approx(norm2).epsilon(1e-13));

    // The whitening rotation is unitary, so norms agree in both bases.
    double wnorm2 = 0.0;
    for (const cplx& w : emse.w_opt_whitened) wnorm2 += std::norm(w);
    CHECK(wnorm2 == doctest::Approx(norm2).epsilon(1e-13));
}

TEST_CASE("frozen transient and steady-state values for the five-tap scenario") {
    const FilterScenario sc = fig_scenario(0.1);
    const LearningCurve lc = learning_curve(sc, 4, Measure::EMSE);
    CHECK(lc.values[0] == doctest::Approx(2.1620291250000037).epsilon(1e-12));
    CHECK(lc.values[1] == doctest::Approx(1.997635991472519).epsilon(1e-12));
    CHECK(lc.values[2] == doctest::Approx(1.8458963699393485).epsilon(1e-12));
    CHECK(lc.values[3] == doctest::Approx(1.7058314783690933).epsilon(1e-12));
    CHECK(steady_state(sc, Measure::EMSE) ==
          doctest::Approx(0.0007029647090791431).epsilon(1e-12));
    CHECK(steady_state(sc, Measure::MSD) ==
          doctest::Approx(0.0007599551147876955).epsilon(1e-12));
    CHECK(steady_state(sc, Measure::MSE) ==
          doctest::Approx(0.010702964709079143).epsilon(1e-12));
    CHECK(steady_state(fig_scenario(0.01), Measure::EMSE) ==
          doctest::Approx(6.7081498669811516e-05).epsilon(1e-12));
}

TEST_CASE("MSE curve is the EMSE curve shifted by the noise floor") {
    const FilterScenario sc = fig_scenario(0.1);
    const LearningCurve emse = learning_curve(sc, 50, Measure::EMSE);
    const LearningCurve mse = learning_curve(sc, 50, Measure::MSE);
    for (size_t i = 0; i < emse.values.size(); ++i)
        CHECK(mse.values[i] == doctest::Approx(emse.values[i] + 0.01).epsilon(1e-13));
}

TEST_CASE("learning curve converges to the steady-state value") {
    for (double mu : {0.1, 0.5, 1.0}) {
        const FilterScenario sc = fig_scenario(mu);
        const LearningCurve lc = learning_curve(sc, 4000, Measure::EMSE);
        const double limit = steady_state(sc, Measure::EMSE);
        CHECK(lc.values.back() == doctest::Approx(limit).epsilon(1e-8));
    }
}

TEST_CASE("learning curve argument validation") {
    const FilterScenario sc = fig_scenario(0.1);
    CHECK_THROWS_AS((void)learning_curve(sc, -1, Measure::EMSE), ValidationError);
    CHECK(learning_curve(sc, 0, Measure::EMSE).values.empty());

    FilterScenario walk(fig_weights(), 0.1, 0.01, InputCovariance::toeplitz(5, 0.5),
                        identity_walk(5, 1e-6));
    CHECK_THROWS_AS((void)learning_curve(walk, 100, Measure::EMSE), ValidationError);
}

TEST_CASE("tracking adds a nonnegative term that is linear in the walk covariance") {
    const double steady = steady_state(fig_scenario(0.1), Measure::EMSE);
    FilterScenario one(fig_weights(), 0.1, 0.01, InputCovariance::toeplitz(5, 0.5),
                       identity_walk(5, 1e-6));
    FilterScenario two(fig_weights(), 0.1, 0.01, InputCovariance::toeplitz(5, 0.5),
                       identity_walk(5, 2e-6));
    const double t1 = tracking_emse(one);
    const double t2 = tracking_emse(two);
    CHECK(t1 == doctest::Approx(0.00082139977106981499).epsilon(1e-12));
    CHECK(t1 > steady);
    CHECK(t2 - steady == doctest::Approx(2.0 * (t1 - steady)).epsilon(1e-10));

    CHECK_THROWS_AS((void)tracking_emse(fig_scenario(0.1)), ValidationError);
}

TEST_CASE("stability report matches the moment identities") {
    const FilterScenario sc = fig_scenario(0.1);
    const StabilityReport st = stability(sc);
    CHECK(st.mean_bound == doctest::Approx(5.0114723974777142).epsilon(1e-12));
    CHECK(st.meansq_bound == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(st.rho_F == doctest::Approx(0.98270848408117428).epsilon(1e-12));

    // mean_bound = 2 / max_k lambda_k E[s_k]; normalization caps that
    // denominator at 1, so the bound never falls below 2.
    const Spectrum s(sc.input_cov.whitened().eigenvalues);
    double worst = 0.0;
    for (int k = 0; k < s.size(); ++k) worst = std::max(worst, s.lambda(k) * mean_sk(s, k));
    CHECK(st.mean_bound == doctest::Approx(2.0 / worst).epsilon(1e-12));
    CHECK(st.mean_bound >= 2.0);
}

TEST_CASE("step sizes past the mean-square bound are reported unstable") {
    const FilterScenario sc = fig_scenario(3.0);
    CHECK(stability(sc).rho_F > 1.0);
    CHECK_THROWS_AS((void)steady_state(sc, Measure::EMSE), InstabilityError);
    FilterScenario walk(fig_weights(), 3.0, 0.01, InputCovariance::toeplitz(5, 0.5),
                        identity_walk(5, 1e-6));
    CHECK_THROWS_AS((void)tracking_emse(walk), InstabilityError);

    // The transient recursion itself still runs and diverges.
    const LearningCurve lc = learning_curve(sc, 600, Measure::EMSE);
    CHECK(lc.values.back() > 10.0 * lc.values.front());
}
