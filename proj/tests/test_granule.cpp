#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "egnn/granule.hpp"

using egnn::Granule;
using egnn::Interval;
using Catch::Matchers::WithinAbs;

namespace {

Granule box1d(double ol, double il, double ih, double oh, double w = 1.0, int label = 1) {
    return Granule::from_parts({{ol, il, ih, oh}}, {w}, label, 0, 0, 0, 0);
}

}  // namespace

TEST_CASE("pointwise granule collapses all bounds onto x") {
    const std::vector<double> x{0.3, 0.7};
    const Granule g = Granule::pointwise(x, 2, 5);

    REQUIRE(g.dims() == 2);
    REQUIRE(g.label() == 2);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& b = g.bounds()[j];
        REQUIRE(b.outer_lo == x[j]);
        REQUIRE(b.inner_lo == x[j]);
        REQUIRE(b.inner_hi == x[j]);
        REQUIRE(b.outer_hi == x[j]);
        REQUIRE(g.weights()[j] == 1.0);
        REQUIRE(g.width(j) == 0.0);
    }
    REQUIRE(g.right_count() == 0);
    REQUIRE(g.wrong_count() == 0);
    REQUIRE(g.last_win_step() == 5);
    REQUIRE(g.created_step() == 5);
}

TEST_CASE("pointwise granule accepts cube corners") {
    const Granule g = Granule::pointwise(std::vector<double>{0.0, 1.0}, 1, 0);
    REQUIRE(g.width(0) == 0.0);
    REQUIRE(g.width(1) == 0.0);
    REQUIRE(g.bounds()[0].outer_lo == 0.0);
    REQUIRE(g.bounds()[1].outer_hi == 1.0);
}

TEST_CASE("pointwise granule stamps creation step") {
    const Granule g = Granule::pointwise(std::vector<double>{0.5}, 3, 10);
    REQUIRE(g.last_win_step() == 10);
    REQUIRE(g.created_step() == 10);
    REQUIRE(g.right_count() == 0);
}

TEST_CASE("pointwise granule rejects bad input") {
    REQUIRE_THROWS_AS(Granule::pointwise(std::vector<double>{}, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(Granule::pointwise(std::vector<double>{1.2}, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(Granule::pointwise(std::vector<double>{-0.1}, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(Granule::pointwise(std::vector<double>{std::nan("")}, 1, 0),
                      std::invalid_argument);
}

TEST_CASE("from_parts validates ordering and weight range") {
    REQUIRE_THROWS_AS(Granule::from_parts({{0.5, 0.4, 0.6, 0.8}}, {1.0}, 1, 0, 0, 0, 0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(Granule::from_parts({{0.2, 0.4, 0.6, 0.8}}, {1.5}, 1, 0, 0, 0, 0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(Granule::from_parts({{0.2, 0.4, 0.6, 0.8}}, {0.5, 0.5}, 1, 0, 0, 0, 0),
                      std::invalid_argument);
}

TEST_CASE("axis similarity of a proper box") {
    const Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    // distances 0.3+0.1+0.1+0.3 over 4*(0.8-0.2)
    REQUIRE_THAT(g.axis_similarity(0, 0.5), WithinAbs(2.0 / 3.0, 1e-14));
}

TEST_CASE("axis similarity of a pointwise granule") {
    const Granule g = Granule::pointwise(std::vector<double>{0.5}, 1, 0);
    REQUIRE(g.axis_similarity(0, 0.5) == 1.0);
    REQUIRE(g.axis_similarity(0, 1.0) == 0.0);
    REQUIRE(g.axis_similarity(0, 0.7) == 0.0);
}

TEST_CASE("similarity stays in [0,1] and hits 1 only on exact pointwise match") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        double b[4] = {unit(rng), unit(rng), unit(rng), unit(rng)};
        std::sort(b, b + 4);
        const Granule g = box1d(b[0], b[1], b[2], b[3]);
        const double x = unit(rng);
        const double s = g.axis_similarity(0, x);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
        if (s == 1.0) {
            REQUIRE(b[0] == x);
            REQUIRE(b[3] == x);
        }
    }
}

TEST_CASE("midpoint, width, core and support") {
    const Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    REQUIRE_THAT(g.midpoint(0), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(g.width(0), WithinAbs(0.6, 1e-15));
    REQUIRE(g.core(0).lo == 0.4);
    REQUIRE(g.core(0).hi == 0.6);
    REQUIRE(g.support(0).lo == 0.2);
    REQUIRE(g.support(0).hi == 0.8);

    const Granule p = Granule::pointwise(std::vector<double>{0.3}, 1, 0);
    REQUIRE(p.midpoint(0) == 0.3);
    REQUIRE(p.width(0) == 0.0);

    const Granule full = box1d(0.0, 0.0, 1.0, 1.0);
    REQUIRE(full.midpoint(0) == 0.5);
    REQUIRE(full.width(0) == 1.0);
}

TEST_CASE("expansion region is midpoint plus/minus half rho") {
    const Granule g = box1d(0.2, 0.4, 0.6, 0.8);  // mp = 0.5
    const Interval e = g.expansion_region(0, 0.6);
    REQUIRE_THAT(e.lo, WithinAbs(0.2, 1e-15));
    REQUIRE_THAT(e.hi, WithinAbs(0.8, 1e-15));

    const Interval degenerate = g.expansion_region(0, 0.0);
    REQUIRE(degenerate.lo == degenerate.hi);

    const Granule low = Granule::pointwise(std::vector<double>{0.1}, 1, 0);
    const Interval spill = low.expansion_region(0, 0.6);
    REQUIRE_THAT(spill.lo, WithinAbs(-0.2, 1e-15));  // may leave the unit cube
    REQUIRE_THAT(spill.hi, WithinAbs(0.4, 1e-15));
}

TEST_CASE("covers_expansion requires every axis inside") {
    const Granule g = Granule::from_parts({{0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}},
                                          {1.0, 1.0}, 1, 0, 0, 0, 0);
    REQUIRE(g.covers_expansion(std::vector<double>{0.7, 0.3}, 0.6));
    REQUIRE_FALSE(g.covers_expansion(std::vector<double>{0.9, 0.5}, 0.6));

    const Granule p = Granule::pointwise(std::vector<double>{0.25, 0.75}, 1, 0);
    REQUIRE(p.covers_expansion(std::vector<double>{0.25, 0.75}, 0.0));
}

TEST_CASE("adapt case a expands the lower support bound") {
    Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    g.adapt(std::vector<double>{0.1}, 0.8);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.1);
    REQUIRE(b.inner_lo == 0.4);
    REQUIRE(b.inner_hi == 0.6);
    REQUIRE(b.outer_hi == 0.8);
}

TEST_CASE("adapt case b pulls the inner box down to x") {
    Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    g.adapt(std::vector<double>{0.3}, 0.8);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.2);
    REQUIRE(b.inner_lo == 0.3);
    REQUIRE(b.inner_hi == 0.5);  // old midpoint
    REQUIRE(b.outer_hi == 0.8);
}

TEST_CASE("adapt case c mirrors case b above the midpoint") {
    Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    g.adapt(std::vector<double>{0.7}, 0.8);
    const auto& b = g.bounds()[0];
    REQUIRE(b.inner_lo == 0.5);
    REQUIRE(b.inner_hi == 0.7);
}

TEST_CASE("adapt case d expands the upper support bound") {
    Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    g.adapt(std::vector<double>{0.85}, 0.8);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_hi == 0.85);
    REQUIRE(b.inner_lo == 0.4);
    REQUIRE(b.inner_hi == 0.6);
}

TEST_CASE("adapt ignores axes outside the expansion region") {
    Granule g = box1d(0.4, 0.45, 0.55, 0.6);
    const auto before = g.bounds()[0];
    g.adapt(std::vector<double>{0.95}, 0.2);  // region is [0.4, 0.6]
    const auto& after = g.bounds()[0];
    REQUIRE(after.outer_lo == before.outer_lo);
    REQUIRE(after.inner_lo == before.inner_lo);
    REQUIRE(after.inner_hi == before.inner_hi);
    REQUIRE(after.outer_hi == before.outer_hi);
}

TEST_CASE("adapt at the exact midpoint of a pointwise granule is a fixed point") {
    Granule g = Granule::pointwise(std::vector<double>{0.5}, 1, 0);
    g.adapt(std::vector<double>{0.5}, 0.6);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.5);
    REQUIRE(b.inner_lo == 0.5);
    REQUIRE(b.inner_hi == 0.5);
    REQUIRE(b.outer_hi == 0.5);
}

TEST_CASE("adapt is idempotent once the inner box has collapsed onto x") {
    Granule g = box1d(0.2, 0.4, 0.6, 0.8);
    g.adapt(std::vector<double>{0.5}, 0.8);  // x equals the midpoint
    const auto once = g.bounds()[0];
    g.adapt(std::vector<double>{0.5}, 0.8);
    const auto& twice = g.bounds()[0];
    REQUIRE(once.outer_lo == twice.outer_lo);
    REQUIRE(once.inner_lo == twice.inner_lo);
    REQUIRE(once.inner_hi == twice.inner_hi);
    REQUIRE(once.outer_hi == twice.outer_hi);
}

TEST_CASE("boundary points resolve to the earliest adaptation case") {
    // x exactly on outer_lo belongs to the inner-box case, not the support
    // expansion; x exactly on the midpoint belongs to the upper inner case.
    Granule at_lo = box1d(0.2, 0.4, 0.6, 0.8);
    at_lo.adapt(std::vector<double>{0.2}, 1.0);
    REQUIRE(at_lo.bounds()[0].inner_lo == 0.2);
    REQUIRE(at_lo.bounds()[0].inner_hi == 0.5);

    Granule at_mp = box1d(0.2, 0.4, 0.6, 0.8);
    at_mp.adapt(std::vector<double>{0.5}, 1.0);
    REQUIRE(at_mp.bounds()[0].inner_lo == 0.5);
    REQUIRE(at_mp.bounds()[0].inner_hi == 0.5);
}

TEST_CASE("adapt contracts the support after the midpoint moves") {
    // Inner jumps to [0.5, 0.9]: new midpoint 0.7, so with rho = 0.4 the
    // support must shrink to [0.5, 0.9] and the inner box stays inside.
    Granule g = box1d(0.1, 0.4, 0.6, 0.9);
    g.adapt(std::vector<double>{0.9}, 0.4);
    const auto& b = g.bounds()[0];
    REQUIRE_THAT(b.outer_lo, WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(b.outer_hi, WithinAbs(0.9, 1e-15));
    REQUIRE_THAT(b.inner_lo, WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(b.inner_hi, WithinAbs(0.9, 1e-15));
    REQUIRE(g.width(0) <= 0.4 + 1e-12);
}

TEST_CASE("enforce_max_width shrinks wide supports around the midpoint") {
    Granule g = box1d(0.0, 0.4, 0.6, 1.0);  // mp = 0.5
    g.enforce_max_width(0.6);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.2);
    REQUIRE(b.outer_hi == 0.8);
    REQUIRE(b.inner_lo == 0.4);
    REQUIRE(b.inner_hi == 0.6);
}

TEST_CASE("enforce_max_width leaves narrow boxes alone") {
    Granule g = box1d(0.3, 0.4, 0.6, 0.7);
    g.enforce_max_width(0.6);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.3);
    REQUIRE(b.outer_hi == 0.7);
}

TEST_CASE("enforce_max_width clamps the inner box into the shrunk support") {
    Granule g = box1d(0.0, 0.1, 0.9, 1.0);  // mp = 0.5
    g.enforce_max_width(0.4);
    const auto& b = g.bounds()[0];
    REQUIRE(b.outer_lo == 0.3);
    REQUIRE(b.outer_hi == 0.7);
    REQUIRE(b.inner_lo == 0.3);
    REQUIRE(b.inner_hi == 0.7);
}

TEST_CASE("record_outcome bumps counters and the win timestamp") {
    Granule g = Granule::pointwise(std::vector<double>{0.5}, 1, 3);
    g.record_outcome(true, 7);
    g.record_outcome(false, 9);
    REQUIRE(g.right_count() == 1);
    REQUIRE(g.wrong_count() == 1);
    REQUIRE(g.last_win_step() == 9);
}

TEST_CASE("weight update scales by the miss ratio") {
    Granule g = Granule::from_parts({{0.2, 0.4, 0.6, 0.8}}, {0.8}, 1, 3, 1, 0, 0);
    g.update_weights(std::vector<double>{0.4}, +1);  // beta = 1/4
    REQUIRE_THAT(g.weights()[0], WithinAbs(0.7, 1e-15));
}

TEST_CASE("weight update clamps to the unit interval") {
    Granule top = Granule::from_parts({{0.2, 0.4, 0.6, 0.8}}, {1.0}, 1, 5, 0, 0, 0);
    top.update_weights(std::vector<double>{0.9}, -1);
    REQUIRE(top.weights()[0] == 1.0);

    Granule bottom = Granule::from_parts({{0.2, 0.4, 0.6, 0.8}}, {0.05}, 1, 0, 4, 0, 0);
    bottom.update_weights(std::vector<double>{0.2}, +1);  // beta = 1
    REQUIRE(bottom.weights()[0] == 0.0);
}

TEST_CASE("adapt keeps the support when x is inside and the cap cannot bind") {
    // Boxes no wider than 0.4 with rho = 1: any midpoint stays within half a
    // rho of both support ends, so the contraction step is a no-op and an
    // in-support x must leave the support bounds untouched.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5000; ++trial) {
        double b[4];
        for (double& v : b) v = 0.3 + 0.4 * unit(rng);
        std::sort(b, b + 4);
        Granule g = box1d(b[0], b[1], b[2], b[3]);
        const double x = b[0] + unit(rng) * (b[3] - b[0]);
        g.adapt(std::vector<double>{x}, 1.0);
        REQUIRE(g.bounds()[0].outer_lo == b[0]);
        REQUIRE(g.bounds()[0].outer_hi == b[3]);
    }
}

TEST_CASE("random operation storms preserve ordering and the width cap") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t dims = 3;

    std::vector<Granule> pool;
    double rho = 0.5;
    for (int op = 0; op < 100000; ++op) {
        const int kind = static_cast<int>(rng() % 4);
        std::vector<double> x(dims);
        for (double& v : x) v = unit(rng);
        if (kind == 0 || pool.empty()) {
            pool.push_back(Granule::pointwise(x, static_cast<int>(rng() % 3), 0));
            if (pool.size() > 32) pool.erase(pool.begin());
        } else if (kind == 1) {
            rho = std::clamp(unit(rng), 1e-3, 1.0);
            for (Granule& g : pool) g.enforce_max_width(rho);
        } else {
            Granule& g = pool[rng() % pool.size()];
            g.adapt(x, rho);
        }

        const Granule& g = pool[rng() % pool.size()];
        for (std::size_t j = 0; j < dims; ++j) {
            const auto& bb = g.bounds()[j];
            REQUIRE(bb.outer_lo <= bb.inner_lo);
            REQUIRE(bb.inner_lo <= bb.inner_hi);
            REQUIRE(bb.inner_hi <= bb.outer_hi);
            REQUIRE(bb.outer_lo >= 0.0);
            REQUIRE(bb.outer_hi <= 1.0);
            if (kind != 0) REQUIRE(g.width(j) <= rho + 1e-12);
        }
    }
}
