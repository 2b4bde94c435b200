#include "test_util.hpp"

#include <catch2/catch.hpp>

#include <random>

using namespace duforge;
using testutil::random_gate;

namespace {

CartanCoords random_chamber_point(StreamRng& rng) {
    double c[3] = {rng.uniform() * kPi / 4, rng.uniform() * kPi / 4, rng.uniform() * kPi / 4};
    std::sort(c, c + 3, std::greater<double>());
    return {c[0], c[1], c[2]};
}

}  // namespace

TEST_CASE("coordinates of the reference gates", "[cartan]") {
    const CartanCoords id = cartan_coords(named_gate("identity", 2).gate);
    REQUIRE(id.c1 == Approx(0.0).margin(1e-10));
    REQUIRE(id.c2 == Approx(0.0).margin(1e-10));
    REQUIRE(id.c3 == Approx(0.0).margin(1e-10));

    const CartanCoords sw = cartan_coords(swap_gate(2));
    REQUIRE(sw.c1 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(sw.c2 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(sw.c3 == Approx(kPi / 4).margin(1e-10));

    const CartanCoords cn = cartan_coords(named_gate("cnot", 2).gate);
    REQUIRE(cn.c1 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(cn.c2 == Approx(0.0).margin(1e-10));
    REQUIRE(cn.c3 == Approx(0.0).margin(1e-10));

    const CartanCoords dc = cartan_coords(named_gate("dcnot", 2).gate);
    REQUIRE(dc.c1 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(dc.c2 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(dc.c3 == Approx(0.0).margin(1e-10));
}

TEST_CASE("cartan_coords rejects d != 2", "[cartan]") {
    REQUIRE_THROWS_AS(cartan_coords(swap_gate(3)), dimension_error);
    REQUIRE_THROWS_AS(chamber_trajectory(swap_gate(3), MapKind::MR, 3), dimension_error);
}

TEST_CASE("canonical gate round-trips through coordinate extraction", "[cartan]") {
    REQUIRE((canonical_gate(0, 0, 0).matrix - Mat::Identity(4, 4)).norm() < 1e-14);

    StreamRng rng({70, 0});
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const CartanCoords in = random_chamber_point(rng);
        const CartanCoords out = cartan_coords(canonical_gate(in));
        worst = std::max({worst, std::abs(out.c1 - in.c1), std::abs(out.c2 - in.c2),
                          std::abs(out.c3 - in.c3)});
    }
    REQUIRE(worst < 1e-9);
}

TEST_CASE("coordinates are invariant under local dressing", "[cartan]") {
    StreamRng rng({71, 0});
    for (int k = 0; k < 20; ++k) {
        const BipartiteUnitary U = random_gate(2, 72, k);
        const CartanCoords base = cartan_coords(U);
        const BipartiteUnitary dressed = testutil::local_dressing(U, rng);
        const CartanCoords c = cartan_coords(dressed);
        REQUIRE(c.c1 == Approx(base.c1).margin(1e-9));
        REQUIRE(c.c2 == Approx(base.c2).margin(1e-9));
        REQUIRE(c.c3 == Approx(base.c3).margin(1e-9));
    }
}

TEST_CASE("global phase does not move the coordinates", "[cartan]") {
    const BipartiteUnitary U = random_gate(2, 73);
    const CartanCoords base = cartan_coords(U);
    const BipartiteUnitary phased(2, Complex(std::cos(1.1), std::sin(1.1)) * U.matrix);
    const CartanCoords c = cartan_coords(phased);
    REQUIRE(c.c1 == Approx(base.c1).margin(1e-10));
    REQUIRE(c.c2 == Approx(base.c2).margin(1e-10));
    REQUIRE(c.c3 == Approx(base.c3).margin(1e-10));
}

TEST_CASE("entangling power over the chamber is capped by 2/9", "[cartan]") {
    // d = 2 has no 2-unitary; the cap is attained at (pi/4, pi/4, 0)
    StreamRng rng({74, 0});
    for (int k = 0; k < 200; ++k)
        REQUIRE(entangling_power(canonical_gate(random_chamber_point(rng))) <=
                2.0 / 9.0 + 1e-12);

    double best = -1.0, best_c3 = -1.0;
    for (int i = 0; i <= 40; ++i) {
        const double c3 = kPi / 4 * i / 40;
        const double ep = entangling_power(canonical_gate(kPi / 4, kPi / 4, c3));
        if (ep > best) {
            best = ep;
            best_c3 = c3;
        }
    }
    REQUIRE(best == Approx(2.0 / 9.0).margin(1e-12));
    REQUIRE(best_c3 == 0.0);
}

TEST_CASE("chamber trajectories terminate on the dual edge", "[cartan]") {
    // CUE seeds under MR: c1, c2 -> pi/4; c3 stays seed-dependent
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto coords = chamber_trajectory(random_gate(2, 75, s), MapKind::MR, 60);
        REQUIRE(coords.size() == 61);
        const CartanCoords last = coords.back();
        REQUIRE(last.c1 == Approx(kPi / 4).margin(1e-6));
        REQUIRE(last.c2 == Approx(kPi / 4).margin(1e-6));
    }

    // base edge reaches dcnot after one step
    const auto base = chamber_trajectory(canonical_gate(0.3, 0.0, 0.0), MapKind::MR, 2);
    REQUIRE(base[1].c1 == Approx(kPi / 4).margin(1e-9));
    REQUIRE(base[1].c2 == Approx(kPi / 4).margin(1e-9));
    REQUIRE(base[1].c3 == Approx(0.0).margin(1e-9));

    // swap stays put
    for (const CartanCoords& c : chamber_trajectory(swap_gate(2), MapKind::MR, 5)) {
        REQUIRE(c.c1 == Approx(kPi / 4).margin(1e-10));
        REQUIRE(c.c3 == Approx(kPi / 4).margin(1e-10));
    }
}
