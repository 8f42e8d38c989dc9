#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fuplab/grid_set.hpp"

using namespace fuplab;

namespace {

CantorSpec middle_thirds(int dim, int depth) {
    CantorSpec spec;
    spec.dim = dim;
    spec.base = 3;
    spec.depth = depth;
    spec.kept_digits.assign(dim, {0, 2});
    return spec;
}

}  // namespace

TEST_CASE("middle-thirds generator: counts and membership") {
    GridSet s = gen_cantor_product(middle_thirds(1, 1));
    CHECK(s.side() == 3);
    CHECK(s.cell_count() == 2);
    CHECK(s.test({0}));
    CHECK(!s.test({1}));
    CHECK(s.test({2}));

    GridSet s3 = gen_cantor_product(middle_thirds(1, 3));
    CHECK(s3.side() == 27);
    CHECK(s3.cell_count() == 8);
    // digit expansions with digits in {0,2}: 0, 2, 6, 8, 18, 20, 24, 26
    for (int i : {0, 2, 6, 8, 18, 20, 24, 26})
        CHECK(s3.test(std::vector<std::int64_t>{i}));
    CHECK(!s3.test({1}));
    CHECK(!s3.test({9}));
}

TEST_CASE("product structure: 2D count is the square of 1D") {
    for (int depth = 1; depth <= 4; ++depth) {
        GridSet s = gen_cantor_product(middle_thirds(2, depth));
        std::size_t one = gen_cantor_product(middle_thirds(1, depth)).cell_count();
        CHECK(s.cell_count() == one * one);
    }
}

TEST_CASE("sierpinski carpet: 8^depth cells, open middles") {
    GridSet s1 = gen_sierpinski(1);
    CHECK(s1.cell_count() == 8);
    CHECK(!s1.test({1, 1}));
    GridSet s3 = gen_sierpinski(3);
    CHECK(s3.side() == 27);
    CHECK(s3.cell_count() == 512);
    CHECK(!s3.test({13, 13}));  // center digits (1,1) at the top scale
    CHECK(s3.test({0, 0}));
    CHECK(s3.test({26, 26}));
}

TEST_CASE("spec validation rejects bad digits and huge grids") {
    CantorSpec bad = middle_thirds(1, 2);
    bad.kept_digits[0] = {0, 3};
    CHECK_THROWS(gen_cantor_product(bad));
    CantorSpec empty = middle_thirds(1, 2);
    empty.kept_digits[0] = {};
    CHECK_THROWS(gen_cantor_product(empty));
    CantorSpec huge = middle_thirds(2, 14);  // 3^28 cells
    CHECK_THROWS(gen_cantor_product(huge));
}

TEST_CASE("index/coords round trip") {
    GridSet s = gen_sierpinski(2);
    for (std::size_t idx : {std::size_t{0}, std::size_t{5}, std::size_t{80}}) {
        auto c = s.coords_of(idx);
        CHECK(s.index_of(c) == idx);
    }
}

TEST_CASE("embeddings: physical box is [-1,1]^d") {
    GridSet s = gen_cantor_product(middle_thirds(2, 2));
    auto lo = s.box_lo();
    auto hi = s.box_hi();
    CHECK(lo[0] == doctest::Approx(-1.0));
    CHECK(hi[1] == doctest::Approx(1.0));
    CHECK(s.cell_width() == doctest::Approx(2.0 / 9.0));
    auto c = s.cell_center({0, 0});
    CHECK(c[0] == doctest::Approx(-1.0 + 1.0 / 9.0));

    GridSet f = s.with_embedding(frequency_embedding(2, s.side()));
    CHECK(f.box_lo()[0] == doctest::Approx(-4.5));
    CHECK(f.box_hi()[0] == doctest::Approx(4.5));
    CHECK(f.same_cells(s));
}

TEST_CASE("thicken grows by the Chebyshev ball and clips") {
    GridSet s(2, 9, physical_embedding(2, 9));
    s.set({4, 4});
    GridSet t = thicken(s, 1);
    CHECK(t.cell_count() == 9);
    CHECK(t.test({3, 3}));
    CHECK(t.test({5, 5}));
    CHECK(!t.test({2, 4}));

    GridSet corner(2, 9, physical_embedding(2, 9));
    corner.set({0, 0});
    CHECK(thicken(corner, 1).cell_count() == 4);
    // monotone: thickening more never loses cells
    GridSet t2 = thicken(s, 2);
    t.for_each_cell([&](const std::vector<std::int64_t>& c) {
        CHECK(t2.test(c));
    });
}

TEST_CASE("translate shifts and flags empty results") {
    GridSet s(1, 9, physical_embedding(1, 9));
    s.set({2});
    GridSet t = translate(s, {3});
    CHECK(t.test({5}));
    CHECK(t.cell_count() == 1);
    GridSet gone = translate(s, {100});
    CHECK(gone.empty());
    CHECK(gone.warning());
}

TEST_CASE("dilate rescales the embedding only") {
    GridSet s = gen_cantor_product(middle_thirds(1, 2));
    GridSet d = dilate(s, 3.0);
    CHECK(d.same_cells(s));
    CHECK(d.cell_width() == doctest::Approx(3.0 * s.cell_width()));
}

TEST_CASE("gset round trip is byte-identical") {
    GridSet s = gen_cantor_product(middle_thirds(2, 3));
    std::ostringstream a, b;
    save_gset(s, a);
    save_gset(s, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().size() > 0);

    std::istringstream in(a.str());
    GridSet back = load_gset(in);
    CHECK(back.same_cells(s));
    CHECK(back.side() == s.side());
    CHECK(back.cell_width() == s.cell_width());
    CHECK(back.embedding().offset == s.embedding().offset);

    std::ostringstream c;
    save_gset(back, c);
    CHECK(c.str() == a.str());
}

TEST_CASE("gset file round trip") {
    GridSet s = gen_sierpinski(2);
    const char* path = "test_grid_set_tmp.gset";
    save_gset(s, path);
    GridSet back = load_gset(path);
    CHECK(back.same_cells(s));
    std::remove(path);
}

TEST_CASE("generators are deterministic") {
    GridSet a = gen_cantor_product(middle_thirds(2, 4));
    GridSet b = gen_cantor_product(middle_thirds(2, 4));
    CHECK(a.same_cells(b));
}
