#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fuplab/grid_set.hpp"
#include "fuplab/porosity.hpp"

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

GridSet full_grid(int dim, std::int64_t n) {
    GridSet s(dim, n, physical_embedding(dim, n));
    for (std::size_t i = 0; i < s.total_cells(); ++i) s.set(i);
    return s;
}

}  // namespace

TEST_CASE("hole distances match the brute-force oracle") {
    for (int depth : {1, 2}) {
        GridSet s = gen_sierpinski(depth);
        HoleDistance hd(s);
        auto brute = reference::hole_distance_brute(s);
        REQUIRE(brute.size() == hd.raw().size());
        for (std::size_t i = 0; i < brute.size(); ++i)
            CHECK(hd.raw()[i] == doctest::Approx(brute[i]).epsilon(1e-12));
    }
    // random sets in 1 and 2 dimensions
    std::mt19937 rng(7);
    for (int dim : {1, 2}) {
        GridSet s(dim, dim == 1 ? 64 : 16, physical_embedding(dim, dim == 1 ? 64 : 16));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::size_t i = 0; i < s.total_cells(); ++i)
            if (coin(rng) < 0.3) s.set(i);
        if (s.empty()) s.set(0);
        HoleDistance hd(s);
        auto brute = reference::hole_distance_brute(s);
        for (std::size_t i = 0; i < brute.size(); ++i)
            CHECK(hd.raw()[i] == doctest::Approx(brute[i]).epsilon(1e-12));
    }
}

TEST_CASE("ball porosity: middle-thirds certifies, full grid does not") {
    GridSet c = gen_cantor_product(middle_thirds(1, 5));
    double a0 = 4.0 * c.cell_width();
    PorosityReport rep = analyze_ball_porosity(c, a0, 1.0, 1.0 / 24.0);
    CHECK(rep.nu_max >= 1.0 / 24.0);
    CHECK(!rep.witness);

    GridSet f = full_grid(2, 27);
    PorosityReport bad = analyze_ball_porosity(f, 4.0 * f.cell_width(), 1.0,
                                               1.0 / 24.0);
    CHECK(bad.nu_max == 0.0);
    CHECK(bad.witness.has_value());
}

TEST_CASE("empty set is porous at the lattice cap") {
    GridSet e(2, 27, physical_embedding(2, 27));
    PorosityReport rep = analyze_ball_porosity(e, 0.1, 1.0, 1.0 / 3.0);
    CHECK(rep.nu_max == doctest::Approx(1.0 / 3.0));
    CHECK(!rep.witness);
}

TEST_CASE("single-scale certification agrees with the brute oracle") {
    GridSet s = gen_sierpinski(2);
    for (double R : {0.3, 0.5, 0.9}) {
        // the (R, 1.4R) ladder is exactly {R, 1.4R}
        double expected = std::min(reference::ball_nu_at_scale_brute(s, R),
                                   reference::ball_nu_at_scale_brute(s, 1.4 * R));
        PorosityReport rep = analyze_ball_porosity(s, R, 1.4 * R, 1.0 / 3.0);
        CHECK(rep.nu_max == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("dilation invariance after rescaling the range") {
    GridSet s = gen_cantor_product(middle_thirds(2, 3));
    GridSet d = dilate(s, 2.0);
    PorosityReport a = analyze_ball_porosity(s, 0.2, 0.8, 1.0 / 3.0);
    PorosityReport b = analyze_ball_porosity(d, 0.4, 1.6, 1.0 / 3.0);
    CHECK(a.nu_max == doctest::Approx(b.nu_max));
}

TEST_CASE("line porosity: Cantor product passes, carpet has a full segment") {
    GridSet c = gen_cantor_product(middle_thirds(2, 4));
    PorosityReport ok = analyze_line_porosity(c, 8.0 * c.cell_width(), 1.0, 16,
                                              1.0 / 48.0);
    CHECK(ok.nu_max >= 1.0 / 48.0);
    CHECK(ok.directions_tested >= 16);

    for (int depth : {2, 3}) {
        GridSet s = gen_sierpinski(depth);
        PorosityReport bad = analyze_line_porosity(s, 0.5, 1.0, 8, 1.0 / 48.0);
        CHECK(bad.nu_max == 0.0);
        REQUIRE(bad.witness.has_value());
        // the witness segment runs along an edge of the carpet
        auto dir = bad.witness->direction;
        CHECK(std::abs(std::abs(dir[0]) + std::abs(dir[1]) - 1.0) < 1e-12);
    }
}

TEST_CASE("line porosity implies ball porosity, not conversely") {
    GridSet s = gen_sierpinski(3);
    PorosityReport ball = analyze_ball_porosity(s, 0.3, 1.0, 1.0 / 48.0);
    PorosityReport line = analyze_line_porosity(s, 0.3, 1.0, 8, 1.0 / 48.0);
    CHECK(ball.nu_max > 0.0);
    CHECK(line.nu_max == 0.0);
}

TEST_CASE("box porosity: exact base-3 checks") {
    GridSet c1 = gen_cantor_product(middle_thirds(1, 3));
    CHECK(check_box_porosity(c1, 3, 0));
    CHECK(check_box_porosity(c1, 3, 1));
    CHECK(check_box_porosity(c1, 3, 2));

    GridSet carpet = gen_sierpinski(3);
    CHECK(check_box_porosity(carpet, 3, 0));
    CHECK(check_box_porosity(carpet, 3, 1));
    CHECK(check_box_porosity(carpet, 3, 2));

    GridSet f = full_grid(1, 27);
    CHECK(!check_box_porosity(f, 3, 0));

    CHECK_THROWS(check_box_porosity(c1, 3, 3));  // 3^4 does not divide 27
    CHECK_THROWS(check_box_porosity(c1, 2, 0));  // 2 does not divide 27
}

TEST_CASE("segment intersection measure is exact on known configurations") {
    // cells {0,2} of a 3-cell grid on [-1,1]: [-1,-1/3] and [1/3,1]
    GridSet s = gen_cantor_product(middle_thirds(1, 1));
    CHECK(segment_intersection_measure(s, {-1.0}, {1.0}, 2.0) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(segment_intersection_measure(s, {-1.0}, {1.0}, 1.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(segment_intersection_measure(s, {-1.0 / 3.0}, {1.0}, 0.5) ==
          doctest::Approx(0.0).epsilon(1e-12));

    GridSet f = full_grid(2, 9);
    double diag = segment_intersection_measure(f, {-0.5, -0.5},
                                               {std::sqrt(0.5), std::sqrt(0.5)},
                                               1.0);
    CHECK(diag == doctest::Approx(1.0).epsilon(1e-9));
    GridSet e(2, 9, physical_embedding(2, 9));
    CHECK(segment_intersection_measure(e, {-0.5, -0.5}, {1.0, 0.0}, 1.0) == 0.0);
}

TEST_CASE("line profile bounded by segment length and decreasing for Cantor") {
    GridSet c = gen_cantor_product(middle_thirds(2, 4));
    double m1 = line_intersection_profile(c, 0.9, 16);
    double m2 = line_intersection_profile(c, 0.3, 16);
    CHECK(m1 <= 0.9 + 1e-12);
    CHECK(m2 <= 0.3 + 1e-12);
    CHECK(m1 > 0.0);
}

TEST_CASE("power-law fits report positive exponents for Cantor sets") {
    GridSet c = gen_cantor_product(middle_thirds(2, 4));
    PowerLawFit line = fit_line_gamma(c, 4.0 * c.cell_width(), 1.0, 16);
    CHECK(line.exponent > 0.0);
    CHECK(line.points >= 3);
    PowerLawFit ball = fit_ball_gamma(c, 4.0 * c.cell_width(), 1.0);
    CHECK(ball.exponent > 0.0);
}

TEST_CASE("reports are deterministic") {
    GridSet s = gen_sierpinski(3);
    PorosityReport a = analyze_line_porosity(s, 0.2, 1.0, 12, 1.0 / 96.0);
    PorosityReport b = analyze_line_porosity(s, 0.2, 1.0, 12, 1.0 / 96.0);
    CHECK(a.nu_max == b.nu_max);
    CHECK(a.positions_tested == b.positions_tested);
}
