#include <catch2/catch_amalgamated.hpp>

#include "qbat/basis.hpp"

using namespace qbat;

TEST_CASE("SpinSector exposes dimension and ascending m-values", "[basis]") {
    const SpinSector half(1);
    REQUIRE(half.dim() == 2);
    REQUIRE(half.j() == Catch::Approx(0.5));
    REQUIRE(half.m(0) == Catch::Approx(-0.5));
    REQUIRE(half.m(1) == Catch::Approx(0.5));

    const SpinSector five(4);  // j = 2
    REQUIRE(five.dim() == 5);
    for (std::size_t n = 1; n < five.dim(); ++n) {
        REQUIRE(five.m(n) == Catch::Approx(five.m(n - 1) + 1.0));
    }
    REQUIRE_THROWS_AS(SpinSector(-1), std::invalid_argument);
    REQUIRE_THROWS_AS(five.m(5), std::out_of_range);
}

TEST_CASE("ProductBasis flat index map", "[basis]") {
    const ProductBasis basis(2, 4);
    REQUIRE(basis.dim() == 15);
    REQUIRE(basis.index(0, 4) == 4);
    REQUIRE(basis.index(2, 0) == 10);

    SECTION("round-trip over every state is the identity") {
        for (std::size_t nb = 0; nb <= 2; ++nb) {
            for (std::size_t nc = 0; nc <= 4; ++nc) {
                const auto k = basis.index(nb, nc);
                const auto [rb, rc] = basis.unindex(k);
                REQUIRE(rb == nb);
                REQUIRE(rc == nc);
            }
        }
    }

    SECTION("out-of-range indices are rejected") {
        REQUIRE_THROWS_AS(basis.index(3, 0), std::out_of_range);
        REQUIRE_THROWS_AS(basis.index(0, 5), std::out_of_range);
        REQUIRE_THROWS_AS(basis.unindex(15), std::out_of_range);
    }

    SECTION("excitation weights count the battery quanta") {
        const auto w = basis.battery_excitation_weights();
        REQUIRE(w[basis.index(0, 3)] == 0.0);
        REQUIRE(w[basis.index(1, 2)] == 1.0);
        REQUIRE(w[basis.index(2, 4)] == 2.0);
    }
}
