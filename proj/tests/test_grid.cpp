#include <catch2/catch_amalgamated.hpp>

#include "pdelearn/grid.hpp"

using namespace pdelearn;

TEST_CASE("uniform grid construction") {
    const Grid g = Grid::uniform(0.0, 1.0, 101, 0.0, 2.0, 300);
    CHECK(g.nx() == 101);
    CHECK(g.nt() == 300);
    CHECK(g.dx() == Catch::Approx(0.01));
    CHECK(g.dt() == Catch::Approx(2.0 / 299.0));
    CHECK(g.x().front() == 0.0);
    CHECK(g.x().back() == 1.0);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid({0.0, 1.0}, {0.0, 0.5, 1.0}), GridError);
    CHECK_THROWS_AS(Grid({0.0, 0.5, 0.4}, {0.0, 0.5, 1.0}), GridError);
    CHECK_THROWS_AS(Grid({0.0, 0.5, 0.5}, {0.0, 0.5, 1.0}), GridError);
    // Non-uniform spacing well past the 1e-12 relative tolerance.
    CHECK_THROWS_AS(Grid({0.0, 0.4, 1.0}, {0.0, 0.5, 1.0}), GridError);
    // Tiny jitter below the tolerance is accepted.
    CHECK_NOTHROW(Grid({0.0, 0.5, 1.0 + 1e-14}, {0.0, 0.5, 1.0}));
}

TEST_CASE("field dimensions must match the grid") {
    const Grid g = Grid::uniform(0.0, 1.0, 4, 0.0, 1.0, 5);
    CHECK_NOTHROW(Field(g, Eigen::MatrixXd::Zero(4, 5), "u"));
    CHECK_THROWS_AS(Field(g, Eigen::MatrixXd::Zero(5, 4), "u"), GridError);
}
