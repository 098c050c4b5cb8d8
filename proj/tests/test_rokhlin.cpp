#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <ergo/rokhlin.hpp>

using namespace ergo;
using namespace fixtures;

TEST_CASE("interval map on coordinate generators") {
    auto gens = coordinate_generators(sigma2(), 2);
    IntervalMap im = interval_map(bern_half(), gens);
    REQUIRE(im.entries.size() == 4);
    CHECK(im.at("00").lo == q(0));
    CHECK(im.at("00").hi == q(1, 4));
    CHECK(im.at("01").lo == q(1, 4));
    CHECK(im.at("01").hi == q(1, 2));
    CHECK(im.at("10").lo == q(1, 2));
    CHECK(im.at("10").hi == q(3, 4));
    CHECK(im.at("11").lo == q(3, 4));
    CHECK(im.at("11").hi == q(1));

    IntervalMap one = interval_map(bern_third(), coordinate_generators(sigma2(), 1));
    CHECK(one.at("0").hi == q(1, 3));
    CHECK(one.at("1").lo == q(1, 3));
    CHECK(one.at("1").hi == q(1));

    // zero-measure cells receive empty intervals
    Measure pt = bern(sigma2(), {q(1), q(0)});
    IntervalMap degenerate = interval_map(pt, coordinate_generators(sigma2(), 2));
    CHECK(degenerate.at("00").hi == q(1));
    for (std::string w : {"01", "10", "11"}) {
        CHECK(degenerate.at(w).lo == degenerate.at(w).hi);
        CHECK(degenerate.at(w).lo == q(1));
    }
}

TEST_CASE("interval lengths equal measures and tile [0,1)") {
    std::mt19937 rng(17);
    std::vector<Measure> measures{bern_third(), golden_markov(), mixture()};
    for (const Measure& mu : measures) {
        const SystemPtr& sys = mu.system();
        std::vector<CylinderSet> gens;
        for (int k = 0; k < 4; ++k) gens.push_back(random_cylinder(sys, rng, 2));
        IntervalMap im = interval_map(mu, gens);
        detail::GeneratorTree tree(mu, gens);
        Scalar prev_hi = q(0);
        for (const IntervalEntry& e : im.entries) {
            CHECK(e.lo == prev_hi); // adjacent, covering
            // interval length equals the measure of the cell, recomputed
            // through an independent set intersection
            CylinderSet cell = tree.set_of(sys, gens, e.word);
            CHECK(e.hi - e.lo == mu(cell));
            prev_hi = e.hi;
        }
        CHECK(prev_hi == q(1));
    }
}

TEST_CASE("lex offset reduced form") {
    auto gens2 = coordinate_generators(sigma2(), 2);
    CHECK(lex_offset(bern_half(), gens2, "00") == q(0));
    CHECK(lex_offset(bern_half(), gens2, "11") == q(3, 4)); // mu(A_0) + mu(A_10)
    CHECK(lex_offset(bern_third(), gens2, "10") == q(1, 3));
    CHECK(lex_offset(golden_markov(), coordinate_generators(sigma2(), 3), "000") == q(0));

    // reduced sums equal the plain predecessor sums for whole families
    for (const Measure& mu : {bern_third(), golden_markov()}) {
        auto gens = coordinate_generators(sigma2(), 6);
        IntervalMap im = interval_map(mu, gens);
        auto reduced = lex_offsets(mu, gens);
        REQUIRE(reduced.size() == im.entries.size());
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            CHECK(reduced[i].first == im.entries[i].word);
            CHECK(reduced[i].second == im.entries[i].lo);
        }
    }
}

TEST_CASE("point coding") {
    auto s2 = sigma2();
    auto gens = coordinate_generators(s2, 6);
    Measure mu = bern_half();

    Word zeros{0, parse_cell(s2, "000000")};
    Word ones{0, parse_cell(s2, "111111")};
    Word alt{0, parse_cell(s2, "101010")};

    for (int n = 0; n <= 6; ++n) {
        CHECK(point_code(mu, gens, zeros, n) == q(0));
        // geometric series: 1 - 2^-n
        CHECK(point_code(mu, gens, ones, n) == q(1) - q(1, 1ll << n));
    }
    CHECK(point_code(mu, gens, alt, 4) == q(5, 8));

    // the code equals the left endpoint of the containing interval
    std::mt19937 rng(2);
    IntervalMap im = interval_map(mu, gens);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        std::string s;
        for (int i = 0; i < 6; ++i) s += char('0' + bit(rng));
        Word x{0, parse_cell(s2, s)};
        CHECK(point_code(mu, gens, x, 6) == im.at(s).lo);

        // monotone, bounded partial sums
        Scalar prev = q(0);
        for (int n = 0; n <= 6; ++n) {
            Scalar v = point_code(mu, gens, x, n);
            CHECK(prev <= v);
            CHECK(v <= q(1));
            prev = v;
        }
    }
}

TEST_CASE("conditional density phi") {
    auto s2 = sigma2();

    // independence: the fiber set ignores the conditioning coordinates
    Measure mu = bern_half();
    auto gens = coordinate_generators(s2, 4);
    CylinderSet far = cyl(s2, 5, "0");
    for (const std::string& prefix : {std::string("0"), std::string("10"), std::string("0110")})
        CHECK(conditional_density(mu, gens, far, prefix) == q(1, 2));

    // golden chain: phi follows the transition row of the conditioning symbol
    Measure g = golden_markov();
    std::vector<CylinderSet> xi{cyl(s2, 0, "0")};
    CylinderSet b = cyl(s2, 1, "0");
    CHECK(conditional_density(g, xi, b, "1") == q(1));     // P(1 -> 0) = 1
    CHECK(conditional_density(g, xi, b, "0") == q(1, 2));  // P(0 -> 0) = 1/2

    // conditioning on a null cell is an error
    auto gens2 = coordinate_generators(s2, 2);
    CHECK_THROWS_AS(conditional_density(g, gens2, b, "11"), error);
}

TEST_CASE("phi martingale property") {
    auto s2 = sigma2();
    for (const Measure& mu : {bern_third(), golden_markov()}) {
        auto gens = coordinate_generators(s2, 4);
        CylinderSet target = cyl(s2, 2, "0");
        detail::GeneratorTree tree(mu, gens);
        for (int m = 1; m <= 4; ++m) {
            for (int j = 0; j <= m; ++j) {
                // integrate phi_m over every cell A_v with |v| = j
                for (std::size_t mask = 0; mask < (1ull << j); ++mask) {
                    std::string v;
                    for (int i = 0; i < j; ++i) v += char('0' + (mask >> (j - 1 - i) & 1));
                    CylinderSet av = tree.set_of(s2, gens, v);
                    if (mu(av).is_zero()) continue;
                    Scalar integral = q(0);
                    for (std::size_t ext = 0; ext < (1ull << (m - j)); ++ext) {
                        std::string w = v;
                        for (int i = 0; i < m - j; ++i) w += char('0' + (ext >> (m - j - 1 - i) & 1));
                        CylinderSet aw = tree.set_of(s2, gens, w);
                        Scalar mass = mu(aw);
                        if (mass.is_zero()) continue;
                        integral += conditional_density(mu, gens, target, w) * mass;
                    }
                    CHECK(integral == mu(intersect(target, av)));
                }
            }
        }
    }
}

TEST_CASE("square chart") {
    auto s2 = sigma2();

    // independent coordinates: four half-by-half squares
    SquareChart prod = square_chart(bern_half(), {cyl(s2, 0, "0")}, {cyl(s2, 1, "0")}, 1, 1);
    REQUIRE(prod.rects.size() == 4);
    for (const ChartRect& r : prod.rects) {
        CHECK(r.x1 - r.x0 == q(1, 2));
        CHECK(r.y1 - r.y0 == q(1, 2));
    }
    CHECK(prod.area() == q(1));

    // k = 0 degenerates to full-height footprints of the interval map
    SquareChart flat = square_chart(bern_third(), coordinate_generators(s2, 2), {}, 2, 0);
    IntervalMap im = interval_map(bern_third(), coordinate_generators(s2, 2));
    REQUIRE(flat.rects.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(flat.rects[i].x0 == im.entries[i].lo);
        CHECK(flat.rects[i].x1 == im.entries[i].hi);
        CHECK(flat.rects[i].y0 == q(0));
        CHECK(flat.rects[i].y1 == q(1));
    }

    // golden chain: column footprints (2/3, 1/3); the x0=1 column is fully
    // carried by the fiber cell [x1=0]
    Measure g = golden_markov();
    SquareChart gc = square_chart(g, {cyl(s2, 0, "0")}, {cyl(s2, 1, "0")}, 1, 1);
    CHECK(gc.densities.at("0").at("1") == q(1));
    CHECK(gc.densities.at("1").at("1") == q(0));
    CHECK(gc.densities.at("0").at("0") == q(1, 2));

    // areas are the joint measures, exactly
    detail::GeneratorTree xt(g, {cyl(s2, 0, "0")});
    for (const ChartRect& r : gc.rects) {
        CylinderSet col = xt.set_of(s2, {cyl(s2, 0, "0")}, r.column);
        CylinderSet fib = r.fiber == "0" ? cyl(s2, 1, "0") : cyl(s2, 1, "1");
        CHECK((r.x1 - r.x0) * (r.y1 - r.y0) == g(intersect(col, fib)));
    }
    CHECK(gc.area() == q(1));
}

TEST_CASE("peano construction") {
    // t = 0 funnels into the origin square at every depth
    for (int n = 1; n <= 6; ++n) {
        PeanoSquare sq = peano_cell(q(0), n);
        CHECK(sq.ix == 0);
        CHECK(sq.iy == 0);
    }

    // depth-1: the four quarter intervals map bijectively onto quarter squares
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (int i = 0; i < 4; ++i) {
        PeanoSquare sq = peano_cell(q(2 * i + 1, 8), 1); // interval midpoints
        CHECK(sq.index == static_cast<std::uint64_t>(i));
        seen.insert({sq.ix, sq.iy});
    }
    CHECK(seen.size() == 4);

    // tiling and exact measure preservation at each depth
    for (int n = 1; n <= 5; ++n) {
        auto tiles = peano_tiles(n);
        CHECK(tiles.size() == (1ull << (2 * n)));
        std::set<std::pair<std::uint64_t, std::uint64_t>> cells;
        Scalar area = q(0);
        for (const PeanoSquare& sq : tiles) {
            CHECK(sq.ix < (1ull << n));
            CHECK(sq.iy < (1ull << n));
            cells.insert({sq.ix, sq.iy});
            area += sq.side() * sq.side();
            CHECK(sq.side() * sq.side() == q(1, 1ll << (2 * n)));
        }
        CHECK(cells.size() == tiles.size()); // disjoint
        CHECK(area == q(1));                 // total area
    }

    // nesting: the depth-(n+1) square refines the depth-n square
    for (int n = 1; n <= 5; ++n) {
        for (std::uint64_t i = 0; i < (1ull << (2 * n)); i += 7) {
            PeanoSquare parent = peano_square_of_index(i / 4, n - 1);
            PeanoSquare child = peano_square_of_index(i, n);
            CHECK(child.ix / 2 == parent.ix);
            CHECK(child.iy / 2 == parent.iy);
        }
    }

    CHECK_THROWS_AS(peano_cell(q(3, 2), 2), error);
}

TEST_CASE("phi convergence diagnostic") {
    auto s2 = sigma2();
    auto gens = coordinate_generators(s2, 6);
    CylinderSet b = cyl(s2, 3, "0");
    auto deltas = phi_convergence(golden_markov(), gens, b, 6);
    REQUIRE(deltas.size() == 5);
    for (double d : deltas) {
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
    // once the conditioning cells pin the fiber coordinate, phi freezes
    CHECK(deltas[3] == 0.0);
    CHECK(deltas[4] == 0.0);

    // independence: nothing ever moves
    for (double d : phi_convergence(bern_half(), gens, cyl(s2, 9, "0"), 6))
        CHECK(d == 0.0);
}

TEST_CASE("basis report") {
    auto s2 = sigma2();
    BasisReport clean = basis_report(bern_half(), coordinate_generators(s2, 4), 3);
    CHECK(clean.words == 8);
    CHECK(clean.empty_cells == 0);
    CHECK(clean.null_cells == 0);
    CHECK(clean.degenerate_cells == 0);
    CHECK(clean.separates);

    // two-component SFT with per-coordinate bit generators: the
    // cross-component words are syntactically empty
    auto tc = two_component();
    std::vector<CylinderSet> bits;
    for (int k = 0; k < 2; ++k) {
        bits.push_back(cyl_union(tc, k, {"2", "3"})); // component bit
        bits.push_back(cyl_union(tc, k, {"1", "3"})); // symbol bit
    }
    BasisReport comp = basis_report(mixture(), bits, 4);
    CHECK(comp.words == 16);
    CHECK(comp.empty_cells == 8);
    CHECK(comp.null_cells == 8);
    CHECK(comp.separates);

    // point mass: everything but one funnel is null, and the surviving cell
    // is an atom candidate
    Measure pt = bern(s2, {q(1), q(0)});
    BasisReport atom = basis_report(pt, coordinate_generators(s2, 4), 3);
    CHECK(atom.null_cells == 7);
    CHECK(atom.empty_cells == 0);
    CHECK(atom.degenerate_cells == 1);
    CHECK(atom.degenerate_mass == q(1));
}
