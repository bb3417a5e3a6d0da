#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace cadlag;

namespace {

DyadicTime T(double x) { return DyadicTime::from_double(x); }

constexpr State a = 0;
constexpr State b = 1;
constexpr State fill = 7;

CadlagPath one_jump() { return CadlagPath(IntervalSet::closed(T(0), T(4)), a, {{T(2), b}}); }

/// {0} ∪ [1,2] with value a at 0 and b on [1,2].
CadlagPath split_fixture() {
    return CadlagPath(IntervalSet({Interval::point(T(0)), Interval::closed(T(1), T(2))}), a, {{T(1), b}});
}

}  // namespace

TEST_CASE("eval and left limits", "[cadlag]") {
    const auto p = one_jump();
    CHECK(p.eval(T(1.9)) == a);
    CHECK(p.eval(T(2)) == b);
    CHECK(p.eval(T(2.5)) == b);
    CHECK(p.left_limit(T(2)) == a);
    CHECK(p.left_limit(T(3)) == b);
    CHECK_THROWS_AS(p.eval(T(5)), std::out_of_range);
    CHECK_THROWS_AS(p.left_limit(T(0)), std::out_of_range);

    const auto c = CadlagPath::constant(IntervalSet::closed(T(0), T(1)), 3);
    CHECK(c.left_limit(T(0.5)) == 3);
    CHECK(c.left_limit(T(1)) == 3);
}

TEST_CASE("path construction enforces the invariants", "[cadlag]") {
    const auto dom = IntervalSet::closed(T(0), T(1));
    CHECK_THROWS(CadlagPath(dom, a, {{T(0.5), b}, {T(0.25), a}}));
    CHECK_THROWS(CadlagPath(dom, a, {{T(0.5), a}}));
    CHECK_THROWS(CadlagPath(dom, a, {{T(0), b}}));
    CHECK_THROWS(CadlagPath(dom, a, {{T(1.5), b}}));
    CHECK_THROWS(CadlagPath(IntervalSet::half_line(T(0)), a));
    CHECK_THROWS(CadlagPath(IntervalSet::half_line(T(0)), a, {{T(2), b}}, T(1)));
    CHECK_NOTHROW(CadlagPath(IntervalSet::half_line(T(0)), a, {{T(0.5), b}}, T(1)));
}

TEST_CASE("restrict examples", "[cadlag]") {
    CHECK(one_jump().restrict(TimeGrid{1, 2, 3}) == StateTuple{a, b, b});
    CHECK(CadlagPath::constant(IntervalSet::closed(T(0), T(1)), 5).restrict(TimeGrid{0, 0.5, 1}) == StateTuple{5, 5, 5});
    CHECK(one_jump().restrict(TimeGrid{3}) == StateTuple{b});
}

TEST_CASE("exact jump count examples", "[cadlag]") {
    const CadlagPath p(IntervalSet::closed(T(0), T(1)), a, {{T(0.3), b}, {T(0.6), a}});
    CHECK(p.exact_jump_count(T(0), T(1)) == 2);
    CHECK(p.exact_jump_count(T(0.31), T(0.59)) == 0);
    CHECK(p.exact_jump_count(T(0.3), T(0.6)) == 1);
    const TimeDomain dom(p.domain());
    const auto est = path_jump_count_estimate([&](const TimeGrid& g) { return p.restrict(g); }, T(0), T(1), dom, 6);
    CHECK(est.value == p.exact_jump_count(T(0), T(1)));

    // the jump into [1,2] from the isolated point 0 counts on [0,2], not on [1,2]
    const auto s = split_fixture();
    CHECK(s.exact_jump_count(T(0), T(2)) == 1);
    CHECK(s.exact_jump_count(T(1), T(2)) == 0);
}

TEST_CASE("exact jump counts bound every grid count and are attained", "[cadlag][property]") {
    oracle::Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        const auto p = oracle::random_path(rng, 3, 8, 1.0);
        const std::size_t exact = p.exact_jump_count(T(0), T(1));
        const auto u = oracle::random_grid(rng, oracle::uniform_int(rng, 1, 12), 0, 1);
        CHECK(count_jumps_tuple(p.restrict(u)) <= exact);
        // 2^-12 lattice jumps are separated by depth 12
        const auto grids = dyadic_refinement(TimeDomain(p.domain()), T(0), T(1), 12);
        CHECK(count_jumps_tuple(p.restrict(grids.back())) == exact);
    }
}

TEST_CASE("left limits differ from values exactly at jump times", "[cadlag][property]") {
    oracle::Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        const auto p = oracle::random_path(rng, 3, 6, 1.0);
        const auto grids = dyadic_refinement(TimeDomain(p.domain()), T(0), T(1), 12);
        for (const auto& t : grids.back()) {
            if (t == T(0)) continue;
            const bool is_jump = std::any_of(p.jumps().begin(), p.jumps().end(), [&](const JumpRecord& j) { return j.time == t; });
            CHECK((p.left_limit(t) != p.eval(t)) == is_jump);
        }
    }
}

TEST_CASE("extension to the reals follows the five cases", "[cadlag]") {
    const auto s = split_fixture();
    CHECK(extension_value(s, T(0.5), fill) == a);  // s* = 0 attained
    CHECK(extension_value(s, T(-1), fill) == fill);
    CHECK(extension_value(s, T(3), fill) == b);  // s* = 2 attained
    CHECK(extension_value(s, T(1.5), fill) == b);
    CHECK(extension_value(s, T(0), fill) == a);

    // open endpoints exercise the right-limit and left-limit cases
    const IntervalSet open_set({Interval::point(T(0)), Interval{T(1), T(2), true, true}});
    const CadlagPath o(open_set, a, {{T(1.5), b}});
    CHECK(extension_value(o, T(1), fill) == a);  // right limit along (1, 2)
    CHECK(extension_value(o, T(3), fill) == b);  // left limit at the unattained sup 2
    CHECK(extension_value(o, T(0.5), fill) == a);

    const auto ext = extend_to_reals(s, fill, T(-2), T(4));
    CHECK(ext.anchor() == fill);
    REQUIRE(ext.jumps().size() == 2);
    CHECK(ext.jumps()[0] == JumpRecord{T(0), a});
    CHECK(ext.jumps()[1] == JumpRecord{T(1), b});
    CHECK(ext.eval(T(0.5)) == a);
    CHECK(ext.eval(T(-1)) == fill);
    CHECK(ext.eval(T(3)) == b);
}

TEST_CASE("extension agrees with the input on its domain", "[cadlag][property]") {
    oracle::Rng rng(43);
    for (int i = 0; i < 100; ++i) {
        const auto p = oracle::random_path(rng, 4, 6, 1.0);
        const auto ext = extend_to_reals(p, fill, T(-1), T(1));
        for (const auto& t : dense_countable_subset(TimeDomain(p.domain()), 10)) CHECK(ext.eval(t) == p.eval(t));
        CHECK(ext.eval(T(-0.5)) == fill);
    }
}

TEST_CASE("reconstruction examples", "[cadlag]") {
    const auto dom = IntervalSet::closed(T(0), T(3));
    DenseSampleTable table{dom, {}};
    for (const auto& t : dense_countable_subset(TimeDomain(dom), 6)) table.samples.emplace_back(t, t < T(2) ? a : b);
    const auto r = reconstruct_from_dense(table, 4);
    CHECK(r.path.anchor() == a);
    REQUIRE(r.path.jumps().size() == 1);
    CHECK(r.path.jumps()[0] == JumpRecord{T(2), b});
    CHECK(r.path.eval(T(2)) == b);
    CHECK(r.jump_uncertainty[0] == 1.0 / 64);

    DenseSampleTable flat{dom, {}};
    for (const auto& t : dense_countable_subset(TimeDomain(dom), 4)) flat.samples.emplace_back(t, 2);
    CHECK(reconstruct_from_dense(flat, 1).path.jumps().empty());

    DenseSampleTable busy{dom, {}};
    State v = 0;
    for (const auto& t : dense_countable_subset(TimeDomain(dom), 4)) busy.samples.emplace_back(t, v ^= 1);
    CHECK_THROWS_AS(reconstruct_from_dense(busy, 5), std::runtime_error);

    DenseSampleTable unsorted{dom, {{T(1), a}, {T(0.5), b}}};
    CHECK_THROWS(reconstruct_from_dense(unsorted, 5));
}

TEST_CASE("restricting then reconstructing is the identity", "[cadlag][property]") {
    oracle::Rng rng(44);
    for (int i = 0; i < 100; ++i) {
        const auto p = oracle::random_path(rng, 3, 8, 1.0);
        // mesh just below the min gap: lattice bisection pins the jumps exactly
        int depth = 0;
        while (std::ldexp(1.0, -depth) >= p.min_jump_gap()) ++depth;
        const auto coarse = restrict_to_dense(p, depth);
        CHECK(reconstruct_from_dense(coarse, 100).path == p);
        // no bisection: exact once the mesh separates the 2^-12 lattice
        const auto fine = restrict_to_dense(p, 12, -1);
        CHECK(reconstruct_from_dense(fine, 100).path == p);
    }
}

TEST_CASE("dense equality", "[cadlag]") {
    const auto dom = IntervalSet::closed(T(0), T(1));
    const CadlagPath p(dom, a, {{T(0.5), b}});
    const CadlagPath q(dom, a);
    CHECK(paths_equal_on_dense(p, p, 4));
    CHECK_FALSE(paths_equal_on_dense(p, q, 1));
    // a blip shorter than the mesh is invisible at a coarse depth
    const CadlagPath blip(dom, a, {{T(0.5 + 1.0 / 1024), b}, {T(0.5 + 2.0 / 1024), a}});
    CHECK(paths_equal_on_dense(blip, q, 4));
    CHECK_FALSE(paths_equal_on_dense(blip, q, 10));
}
