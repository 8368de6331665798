#include <random>

#include "doctest.h"
#include "nlmsa/errors.hpp"
#include "nlmsa/moment_matrices.hpp"
#include "support/oracles.hpp"

using namespace nlmsa;
using testsupport::random_spectrum;

TEST_CASE("whitened matrices assemble the documented entries") {
    const Spectrum s({3.0, 2.0, 1.0});
    const MomentSet ms = derived_moments(s);
    const WhitenedMoments wm = build_whitened(s, ms);
    for (int k = 0; k < 3; ++k) {
        CHECK(wm.a_bar[static_cast<size_t>(k)] ==
              doctest::Approx(2.0 * ms.mean_sk[static_cast<size_t>(k)]).epsilon(1e-15));
        CHECK(wm.b_bar(k, k) ==
              doctest::Approx(ms.second_sk[static_cast<size_t>(k)]).epsilon(1e-15));
        CHECK(wm.c_bar[static_cast<size_t>(k)] ==
              doctest::Approx(ms.self_weighted[static_cast<size_t>(k)]).epsilon(1e-15));
        for (int j = 0; j < 3; ++j) {
            if (j == k) continue;
            CHECK(wm.b_bar(k, j) == doctest::Approx(ms.cross_fourth.at(k, j)).epsilon(1e-15));
            CHECK(wm.b_bar(k, j) == wm.b_bar(j, k));
        }
    }
}

TEST_CASE("scaled matrices apply the eigenvalue weighting") {
    const Spectrum s({3.0, 2.0, 1.0});
    const WhitenedMoments wm = build_whitened(s);
    const ScaledMoments sm = build_scaled(s, wm);
    for (int k = 0; k < 3; ++k) {
        CHECK(sm.a[static_cast<size_t>(k)] ==
              doctest::Approx(s.lambda(k) * wm.a_bar[static_cast<size_t>(k)]).epsilon(1e-15));
        CHECK(sm.c[static_cast<size_t>(k)] ==
              doctest::Approx(s.lambda(k) * wm.c_bar[static_cast<size_t>(k)]).epsilon(1e-15));
        for (int j = 0; j < 3; ++j)
            CHECK(sm.b(k, j) ==
                  doctest::Approx(s.lambda(k) * wm.b_bar(k, j) * s.lambda(j)).epsilon(1e-15));
    }
}

TEST_CASE("trace of A is 2 and entry-sum of B is 1") {
    std::mt19937_64 gen(41);
    for (int rep = 0; rep < 20; ++rep) {
        const Spectrum s(random_spectrum(gen, 3 + rep % 4, 0.12));
        const ScaledMoments sm = build_scaled(s, build_whitened(s));
        Accumulator tr, bsum;
        for (int k = 0; k < s.size(); ++k) {
            tr.add(sm.a[static_cast<size_t>(k)]);
            for (int j = 0; j < s.size(); ++j) bsum.add(sm.b(k, j));
        }
        CHECK(std::fabs(tr.value() - 2.0) < 1e-10);
        CHECK(std::fabs(bsum.value() - 1.0) < 1e-9);
    }
}

TEST_CASE("F is symmetric with the expected entries") {
    const Spectrum s({2.5, 1.3, 0.7, 0.4});
    const double mu = 0.17;
    const MomentMatrices mm = build_F(s, mu);
    CHECK(mm.mu == mu);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(mm.F(i, j) == mm.F(j, i));
            const double want =
                (i == j ? 1.0 - mu * mm.scaled.a[static_cast<size_t>(i)] : 0.0) +
                mu * mu * mm.scaled.b(i, j);
            CHECK(mm.F(i, j) == doctest::Approx(want).epsilon(1e-15));
        }
}

TEST_CASE("rho(F) crosses 1 exactly at the mean-square bound") {
    // B 1 = A 1 / 2 entrywise (both reduce to lambda_k E[s_k]), and B's
    // positivity makes the all-ones vector the Perron eigenvector of
    // A^-1 B. The bound 1 / lambda_max(A^-1 B) is therefore exactly 2,
    // and F at mu = 2 has a unit eigenvalue.
    std::mt19937_64 gen(42);
    for (int rep = 0; rep < 10; ++rep) {
        const Spectrum s(random_spectrum(gen, 3 + rep % 3, 0.15));
        const MomentMatrices below = build_F(s, 2.0 - 1e-6);
        const MomentMatrices at = build_F(s, 2.0);
        const MomentMatrices above = build_F(s, 2.0 + 1e-4);
        CHECK(below.rho_F < 1.0);
        CHECK(at.rho_F == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(above.rho_F > 1.0);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const Spectrum s3({3.0, 2.0, 1.0});
    const Spectrum s4({4.0, 3.0, 2.0, 1.0});
    const WhitenedMoments wm4 = build_whitened(s4);
    CHECK_THROWS_AS((void)build_scaled(s3, wm4), ValidationError);
}
