#include "test_util.hpp"

#include <catch2/catch.hpp>

using namespace duforge;

TEST_CASE("named gates carry their expected class", "[gates]") {
    REQUIRE(named_gate("identity", 3).expected_class.label == GateClass::t_dual);
    REQUIRE(named_gate("swap", 4).expected_class.label == GateClass::dual);
    REQUIRE(named_gate("cnot", 2).expected_class.label == GateClass::t_dual);
    REQUIRE(named_gate("dcnot", 2).expected_class.label == GateClass::dual);
    REQUIRE(named_gate("fourier", 2).expected_class.label == GateClass::dual);

    REQUIRE_THROWS_AS(named_gate("toffoli", 2), parameter_error);
    REQUIRE_THROWS_AS(named_gate("cnot", 3), parameter_error);
    REQUIRE_THROWS_AS(named_gate("swap", 1), dimension_error);
}

TEST_CASE("fourier gate is dual in every dimension", "[gates]") {
    REQUIRE(op_entanglement(named_gate("fourier", 3).gate) == Approx(8.0 / 9.0).margin(1e-12));
    REQUIRE(op_entanglement(named_gate("fourier", 4).gate) ==
            Approx(op_entanglement_max(4)).margin(1e-12));
}

TEST_CASE("dcnot sits at the dual edge of the chamber", "[gates]") {
    const NamedGate dc = named_gate("dcnot", 2);
    REQUIRE(classify(dc.gate).label == GateClass::dual);
    const CartanCoords c = cartan_coords(dc.gate);
    REQUIRE(c.c1 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(c.c2 == Approx(kPi / 4).margin(1e-10));
    REQUIRE(c.c3 == Approx(0.0).margin(1e-10));
}

TEST_CASE("swap has a flat Schmidt spectrum", "[gates]") {
    for (double lam : schmidt_spectrum(named_gate("swap", 4).gate).values)
        REQUIRE(lam == Approx(1.0).margin(1e-12));
}

TEST_CASE("mols_pair builds orthogonal Latin squares for prime powers", "[gates]") {
    for (int d : {3, 4, 5, 7}) {
        const LatinSquarePair pair = mols_pair(d);
        REQUIRE(is_latin_square(pair.first));
        REQUIRE(is_latin_square(pair.second));
        REQUIRE(are_orthogonal(pair.first, pair.second));
    }

    // the d = 3 modular construction: L1 = i + j, L2 = i + 2j (mod 3)
    const LatinSquarePair p3 = mols_pair(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            REQUIRE(p3.first[i][j] == (i + j) % 3);
            REQUIRE(p3.second[i][j] == (i + 2 * j) % 3);
        }

    REQUIRE_THROWS_AS(mols_pair(2), existence_error);
    REQUIRE_THROWS_AS(mols_pair(6), existence_error);
    REQUIRE_THROWS_AS(mols_pair(1), dimension_error);
    REQUIRE_THROWS_AS(mols_pair(12), parameter_error);  // composite non-prime-power
}

TEST_CASE("ols permutations are 2-unitaries with extremal entangling power", "[gates]") {
    REQUIRE(classify(ols_permutation(3).gate, 1e-12).label == GateClass::two_unitary);
    REQUIRE(entangling_power(ols_permutation(3).gate) == Approx(0.5).margin(1e-12));
    REQUIRE(entangling_power(ols_permutation(4).gate) == Approx(0.6).margin(1e-12));
}

TEST_CASE("ols permutations are perfect tensors", "[gates]") {
    for (int d : {3, 4, 5}) {
        const Mat& U = ols_permutation(d).gate.matrix;
        REQUIRE(unitarity_defect(U) < 1e-12);
        REQUIRE(unitarity_defect(realign(U)) < 1e-12);
        REQUIRE(unitarity_defect(partial_transpose(U)) < 1e-12);

        const auto entropies = bipartition_entropies(ame_state(ols_permutation(d).gate));
        for (double e : entropies)
            REQUIRE(e == Approx(op_entanglement_max(d)).margin(1e-12));
    }
}

TEST_CASE("ols permutation trajectory under MR is constant", "[gates]") {
    IterateOptions opt;
    opt.max_iter = 8;
    opt.eps_gap = 1e-30;  // force it through the stall detector
    const IterationTrace trace = iterate(ols_permutation(3).gate, MapKind::MR, opt);
    for (const TraceStep& s : trace.steps) REQUIRE(s.D_n < 1e-12);
    REQUIRE(op_entanglement(trace.final_operator) ==
            Approx(op_entanglement_max(3)).margin(1e-12));
}
