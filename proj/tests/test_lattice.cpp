#include "gwsurgery/lattice.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace gws;

namespace {

HomologyLattice rank2(const std::vector<IntVec>& exceptional = {{0, 1}}) {
    HomologyLattice l;
    l.rank = 2;
    l.basis_labels = {"H", "E"};
    l.exceptional_classes = exceptional;
    return l;
}

}  // namespace

TEST_CASE("apply_map basics") {
    LatticeMap id{rank2(), rank2(), IntMat::identity(2), MapKind::iso};
    validate_map(id);
    CHECK(apply_map(id, {3, -1}) == IntVec{3, -1});

    LatticeMap flop{rank2(), rank2(), int_mat_from_rows({{1, 0}, {0, -1}}), MapKind::iso};
    CHECK(apply_map(flop, {1, 2}) == IntVec{1, -2});

    HomologyLattice line;
    line.rank = 1;
    line.basis_labels = {"B"};
    LatticeMap proj{rank2(), line, int_mat_from_rows({{1, 0}}), MapKind::surjection};
    validate_map(proj);
    CHECK(apply_map(proj, {4, 7}) == IntVec{4});

    CHECK_THROWS_AS(apply_map(proj, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("apply_map is additive") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<long long> entry(-4, 4);
    LatticeMap m{rank2(), rank2(), int_mat_from_rows({{2, 1}, {-1, 3}}), MapKind::iso};
    for (int t = 0; t < 100; ++t) {
        IntVec a{entry(rng), entry(rng)}, b{entry(rng), entry(rng)};
        CHECK(apply_map(m, vec_add(a, b)) == vec_add(apply_map(m, a), apply_map(m, b)));
    }
}

TEST_CASE("lattice map kind validation") {
    CHECK_THROWS_AS(
        validate_map(LatticeMap{rank2(), rank2(), int_mat_from_rows({{2, 0}, {0, 1}}), MapKind::iso}),
        std::invalid_argument);
    HomologyLattice line;
    line.rank = 1;
    line.basis_labels = {"B"};
    CHECK_THROWS_AS(
        validate_map(LatticeMap{line, rank2(), int_mat_from_rows({{1}, {2}}), MapKind::surjection}),
        std::invalid_argument);
    validate_map(LatticeMap{line, rank2(), int_mat_from_rows({{1}, {2}}), MapKind::injection});
    CHECK_THROWS_AS(
        validate_map(LatticeMap{rank2(), rank2(), int_mat_from_rows({{1, 1}, {1, 1}}), MapKind::injection}),
        std::invalid_argument);
}

TEST_CASE("make_flop_map examples") {
    SECTION("rank 2, one pair") {
        LatticeMap m = make_flop_map(rank2(), rank2(), {{0, 0}});
        CHECK(m.matrix == int_mat_from_rows({{1, 0}, {0, -1}}));
    }
    SECTION("rank 3, two pairs") {
        HomologyLattice l;
        l.rank = 3;
        l.basis_labels = {"H", "E1", "E2"};
        l.exceptional_classes = {{0, 1, 0}, {0, 0, 1}};
        LatticeMap m = make_flop_map(l, l, {{0, 0}, {1, 1}});
        CHECK(m.matrix == int_mat_from_rows({{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}));
    }
    SECTION("non-adapted exceptional class rejected") {
        CHECK_THROWS_AS(make_flop_map(rank2({{1, 1}}), rank2(), {{0, 0}}), std::invalid_argument);
    }
    SECTION("pairing index out of range rejected") {
        CHECK_THROWS_AS(make_flop_map(rank2(), rank2(), {{1, 0}}), std::invalid_argument);
    }
    SECTION("non-injective pairing rejected") {
        HomologyLattice l;
        l.rank = 3;
        l.basis_labels = {"H", "E1", "E2"};
        l.exceptional_classes = {{0, 1, 0}, {0, 0, 1}};
        CHECK_THROWS_AS(make_flop_map(l, l, {{0, 0}, {0, 1}}), std::invalid_argument);
    }
}

TEST_CASE("flop map is an involution when pairs are aligned") {
    HomologyLattice l;
    l.rank = 3;
    l.basis_labels = {"H", "E1", "E2"};
    l.exceptional_classes = {{0, 1, 0}, {0, 0, 1}};
    LatticeMap m = make_flop_map(l, l, {{0, 0}, {1, 1}});
    RatMat sq = mat_mul(rat_mat(m.matrix), rat_mat(m.matrix));
    CHECK(sq == RatMat::identity(3));
}

TEST_CASE("coset membership by integer reduction") {
    ClassCoset c{{1, 0}, {{0, 2}}};
    CHECK(coset_contains(c, {1, 0}));
    CHECK(coset_contains(c, {1, 4}));
    CHECK(coset_contains(c, {1, -2}));
    CHECK_FALSE(coset_contains(c, {1, 1}));
    CHECK_FALSE(coset_contains(c, {2, 0}));
    CHECK(coset_equal(c, {1, 2}, {1, -4}));
    CHECK_FALSE(coset_equal(c, {1, 2}, {1, 1}));
}

namespace {

// Independent oracle: enumerate coefficient boxes directly.
std::set<IntVec> brute_fiber(const LatticeMap& m, const IntVec& b, const RatVec& area,
                             const Rational& bound, const std::vector<IntVec>& cone) {
    std::set<IntVec> out;
    std::vector<long long> caps;
    for (const auto& g : cone) {
        long long cap = 0;
        while (Rational(cap + 1) * dot(area, g) <= bound) ++cap;
        caps.push_back(cap);
    }
    std::vector<long long> c(cone.size(), 0);
    while (true) {
        IntVec v(m.source.rank, 0);
        for (std::size_t j = 0; j < cone.size(); ++j) v = vec_add(v, vec_scale(c[j], cone[j]));
        if (dot(area, v) <= bound && mat_apply(m.matrix, v) == b) out.insert(v);
        std::size_t j = 0;
        while (j < c.size() && ++c[j] > caps[j]) c[j++] = 0;
        if (j == c.size()) break;
    }
    return out;
}

}  // namespace

TEST_CASE("fiber_classes examples and oracle equivalence") {
    HomologyLattice line;
    line.rank = 1;
    line.basis_labels = {"B"};
    LatticeMap proj{rank2(), line, int_mat_from_rows({{1, 0}}), MapKind::surjection};
    RatVec area{Rational(10), Rational(1)};
    std::vector<IntVec> cone{{1, 0}, {0, 1}};

    SECTION("bounded slice over b=1") {
        auto fib = fiber_classes(proj, {1}, area, Rational(12), cone);
        CHECK(fib == std::vector<IntVec>{{1, 0}, {1, 1}, {1, 2}});
    }
    SECTION("fiber over zero") {
        auto fib = fiber_classes(proj, {0}, area, Rational(3), cone);
        CHECK(fib == std::vector<IntVec>{{0, 0}, {0, 1}, {0, 2}, {0, 3}});
    }
    SECTION("zero bound keeps only the zero class") {
        auto fib = fiber_classes(proj, {0}, area, Rational(0), cone);
        CHECK(fib == std::vector<IntVec>{{0, 0}});
    }
    SECTION("non-positive area on a generator is rejected") {
        CHECK_THROWS_AS(fiber_classes(proj, {1}, RatVec{Rational(10), Rational(0)}, Rational(5), cone),
                        std::invalid_argument);
    }
    SECTION("oracle equivalence on random bounded instances") {
        std::mt19937 rng(3);
        for (int t = 0; t < 40; ++t) {
            Rational bound(1 + static_cast<long long>(rng() % 20));
            IntVec b{static_cast<long long>(rng() % 3)};
            auto fast = fiber_classes(proj, b, area, bound, cone);
            auto slow = brute_fiber(proj, b, area, bound, cone);
            CHECK(std::set<IntVec>(fast.begin(), fast.end()) == slow);
            for (const auto& v : fast) CHECK(apply_map(proj, v) == b);
        }
    }
    SECTION("dependent generators are deduplicated") {
        std::vector<IntVec> dep{{1, 0}, {0, 1}, {1, 1}};
        auto fast = fiber_classes(proj, {1}, area, Rational(12), dep);
        auto slow = brute_fiber(proj, {1}, area, Rational(12), dep);
        CHECK(std::set<IntVec>(fast.begin(), fast.end()) == slow);
        CHECK(fast.size() == slow.size());
    }
    SECTION("rank-3 source against the oracle") {
        HomologyLattice three;
        three.rank = 3;
        three.basis_labels = {"A", "B", "C"};
        LatticeMap m{three, rank2(), int_mat_from_rows({{1, 0, 0}, {0, 1, 1}}), MapKind::surjection};
        validate_map(m);
        RatVec area3{Rational(2), Rational(3), Rational(1)};
        std::vector<IntVec> cone3{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        std::mt19937 rng(9);
        for (int t = 0; t < 20; ++t) {
            Rational bound(1 + static_cast<long long>(rng() % 20));
            IntVec b{static_cast<long long>(rng() % 3), static_cast<long long>(rng() % 4)};
            auto fast = fiber_classes(m, b, area3, bound, cone3);
            auto slow = brute_fiber(m, b, area3, bound, cone3);
            CHECK(std::set<IntVec>(fast.begin(), fast.end()) == slow);
        }
    }
}

TEST_CASE("enumerate_cone completeness on a rank-3 spot check") {
    std::vector<IntVec> cone{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    RatVec area{Rational(1), Rational(1), Rational(1)};
    auto pts = enumerate_cone(3, cone, area, Rational(3));
    // Lattice points of the simplex sum <= 3: C(3+3,3) = 20.
    CHECK(pts.size() == 20);
}
