#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "finsler/flatness.hpp"
#include "finsler/patch_io.hpp"
#include "finsler/sampling.hpp"
#include "oracles.hpp"

using namespace finsler;
using finsler::testing::fd_hamel;
using Catch::Approx;

namespace {

std::vector<DirectionPoint> samples_for(const ManifoldPatch& p, int k, std::uint64_t seed) {
    SampleRng rng(seed);
    std::vector<DirectionPoint> out;
    for (int i = 0; i < k; ++i) out.push_back(rng.direction_point(p));
    return out;
}

}  // namespace

TEST_CASE("Hamel residual vanishes for locally Minkowski data") {
    for (const auto* name : {"riemannian-only", "euclidean-exact"}) {
        auto p = catalog_patch(name);
        SampleRng rng(41);
        for (int t = 0; t < 15; ++t) {
            Vec r = hamel_residual(p, rng.direction_point(p));
            INFO(name);
            CHECK(norm2(r) < 1e-12);
            Vec rr = hamel_residual(p, rng.direction_point(p), true);
            CHECK(norm2(rr) < 1e-12);
        }
    }
}

TEST_CASE("Hamel residual is nonzero on the rotational patch") {
    auto p = catalog_patch("rotational");
    DirectionPoint dp{{1, 1}, {1, 0}};
    Vec r = hamel_residual(p, dp);
    CHECK(norm2(r) > 1e-3);
    // cross-check against the finite-difference evaluation
    Vec fd = fd_hamel(p, dp);
    for (int i = 0; i < 2; ++i)
        CHECK(r[static_cast<std::size_t>(i)] ==
              Approx(fd[static_cast<std::size_t>(i)]).margin(1e-5));
}

TEST_CASE("Hamel residual agrees with finite differences on random samples") {
    SampleRng rng(42);
    for (const auto* name : {"exact-bump", "rotational", "conformal"}) {
        auto p = catalog_patch(name);
        for (int t = 0; t < 17; ++t) {
            DirectionPoint dp = rng.direction_point(p);
            Vec exact = hamel_residual(p, dp);
            Vec fd = fd_hamel(p, dp);
            for (int i = 0; i < 2; ++i) {
                INFO(name);
                double scale = std::max(1.0, std::abs(exact[static_cast<std::size_t>(i)]));
                CHECK(std::abs(exact[static_cast<std::size_t>(i)] - fd[static_cast<std::size_t>(i)]) / scale < 1e-5);
            }
        }
    }
}

TEST_CASE("Hamel residual is 1-homogeneous in y") {
    // dF/dx^k is 1-homogeneous and d2F/dx^m dy^k is 0-homogeneous, so the
    // y^m contraction makes both terms degree 1.
    auto p = catalog_patch("rotational");
    SampleRng rng(43);
    for (int t = 0; t < 10; ++t) {
        DirectionPoint dp = rng.direction_point(p);
        Vec r1 = hamel_residual(p, dp);
        Vec r2 = hamel_residual(p, {dp.x, 3.0 * dp.y});
        for (int i = 0; i < 2; ++i)
            CHECK(r2[static_cast<std::size_t>(i)] ==
                  Approx(3.0 * r1[static_cast<std::size_t>(i)]).margin(1e-10).epsilon(1e-8));
    }
}

TEST_CASE("projective factor") {
    SECTION("constant coefficients give P = 0") {
        auto p = catalog_patch("euclidean-exact");
        CHECK(projective_factor(p, {{0.5, -0.5}, {1, 2}}) == Approx(0.0).margin(1e-14));
    }
    SECTION("P is 1-homogeneous in y") {
        auto p = catalog_patch("conformal");
        SampleRng rng(44);
        for (int t = 0; t < 10; ++t) {
            DirectionPoint dp = rng.direction_point(p);
            double p1 = projective_factor(p, dp);
            double p2 = projective_factor(p, {dp.x, 2.0 * dp.y});
            CHECK(p2 == Approx(2.0 * p1).epsilon(1e-10).margin(1e-12));
        }
    }
    SECTION("conformal patch value at the origin") {
        // F = e^{0.1 x1} |y|, dF/dx1 = 0.1 F, so P = 0.1 y^1 / 2 = 0.05 at
        // y = (1, 0).
        auto p = catalog_patch("conformal");
        CHECK(projective_factor(p, {{0, 0}, {1, 0}}) == Approx(0.05).epsilon(1e-10));
    }
}

TEST_CASE("projective defect") {
    SECTION("constant coefficients: zero vector") {
        auto p = catalog_patch("euclidean-exact");
        Vec d = projective_flat_defect(p, {{0.3, 0.9}, {1, -1}});
        CHECK(norm2(d) < 1e-13);
    }
    SECTION("consistency with its ingredients") {
        auto p = catalog_patch("conformal");
        DirectionPoint dp{{0, 0}, {1, 0}};
        Vec d = projective_flat_defect(p, dp);
        Vec G = spray_coefficients(p, dp).G;
        double P = projective_factor(p, dp);
        for (int i = 0; i < 2; ++i)
            CHECK(d[static_cast<std::size_t>(i)] ==
                  Approx(G[static_cast<std::size_t>(i)] - P * dp.y[static_cast<std::size_t>(i)])
                      .margin(1e-14));
        CHECK(norm2(d) > 0.0);  // conformal metric is not projectively flat
    }
    SECTION("2-homogeneity in y") {
        auto p = catalog_patch("conformal");
        SampleRng rng(45);
        for (int t = 0; t < 10; ++t) {
            DirectionPoint dp = rng.direction_point(p);
            Vec d1 = projective_flat_defect(p, dp);
            Vec d2 = projective_flat_defect(p, {dp.x, 2.0 * dp.y});
            for (int i = 0; i < 2; ++i)
                CHECK(d2[static_cast<std::size_t>(i)] ==
                      Approx(4.0 * d1[static_cast<std::size_t>(i)]).margin(1e-10).epsilon(1e-8));
        }
    }
}

TEST_CASE("flatness report per patch") {
    SECTION("flat patch passes with the reversibility implication") {
        auto p = catalog_patch("euclidean-exact");
        auto rep = flatness_report(p, samples_for(p, 40, 46), 1e-7);
        CHECK(rep.pass);
        CHECK(rep.max_residual < 1e-12);
    }
    SECTION("F and reverse fail together on the exact nonlinear patch") {
        // closed b makes Hamel(F) and Hamel(reverse) identical pointwise
        auto p = catalog_patch("exact-bump");
        SampleRng rng(47);
        double max_f = 0.0, max_r = 0.0;
        for (int t = 0; t < 40; ++t) {
            DirectionPoint dp = rng.direction_point(p);
            Vec hf = hamel_residual(p, dp, false);
            Vec hr = hamel_residual(p, dp, true);
            for (int i = 0; i < 2; ++i) {
                CHECK(hf[static_cast<std::size_t>(i)] ==
                      Approx(hr[static_cast<std::size_t>(i)]).margin(1e-10).epsilon(1e-8));
            }
            max_f = std::max(max_f, norm2(hf));
            max_r = std::max(max_r, norm2(hr));
        }
        CHECK((max_f < 1e-8) == (max_r < 1e-8));
        auto rep = flatness_report(p, samples_for(p, 40, 47));
        CHECK((rep.pass || rep.max_residual >= 1e-8));
    }
    SECTION("rotational patch fails with no implication asserted") {
        auto p = catalog_patch("rotational");
        auto rep = flatness_report(p, samples_for(p, 40, 48), 0.85);
        CHECK_FALSE(rep.pass);
        bool has_vacuous = false;
        for (const auto& d : rep.details)
            if (d.find("vacuous") != std::string::npos) has_vacuous = true;
        CHECK(has_vacuous);
    }
    SECTION("empty sample set is rejected") {
        auto p = catalog_patch("rotational");
        CHECK_THROWS_AS(flatness_report(p, {}), Error);
    }
}

TEST_CASE("flatness biconditional between F and reverse across the catalog") {
    for (const auto* name :
         {"riemannian-only", "euclidean-exact", "exact-bump", "exact-mixed", "rotational", "conformal"}) {
        auto p = catalog_patch(name);
        SampleRng rng(49);
        double max_f = 0.0, max_r = 0.0;
        for (int t = 0; t < 60; ++t) {
            DirectionPoint dp = rng.direction_point(p);
            max_f = std::max(max_f, norm2(hamel_residual(p, dp, false)));
            max_r = std::max(max_r, norm2(hamel_residual(p, dp, true)));
        }
        INFO(name << " maxF=" << max_f << " maxRev=" << max_r);
        CHECK((max_f < 1e-8) == (max_r < 1e-8));
    }
}
