#pragma once

// Quantum 3-point functions as Novikov series. Genus is fixed to 0; the
// deformation direction w enters through at most J insertions, each weighted
// 1/j!. The constant term is the classical cup product; quantum terms run
// over nonzero classes within the area bound, with multiple-cover tails
// along flop loci compressed into geometric atoms.

#include "gwsurgery/gw_tables.hpp"
#include "gwsurgery/novikov.hpp"

#include <optional>
#include <set>

namespace gws {

struct QuantumContext {
    const ThreefoldModel* model = nullptr;
    const GWTable* table = nullptr;
    std::optional<Insertion> w;
    int w_order = 0;  // J: maximum number of w insertions
    Rational area_bound;
};

struct ThreePointResult {
    NovikovSeries series;
    std::vector<GWKey> absent_keys;
};

inline ThreePointResult three_point(const QuantumContext& ctx, const Insertion& a1,
                                    const Insertion& a2, const Insertion& a3) {
    const ThreefoldModel& m = *ctx.model;
    const GWTable& table = *ctx.table;
    if (ctx.area_bound <= 0) throw std::invalid_argument("three_point: area bound must be positive");
    if (ctx.w_order < 0) throw std::invalid_argument("three_point: w order must be non-negative");
    for (const Insertion* a : {&a1, &a2, &a3}) {
        if (a->value.degree % 2 != 0)
            throw std::invalid_argument("three_point: insertions must have even degree");
        validate_class(m, a->value);
    }
    if (ctx.w && ctx.w->value.degree % 2 != 0)
        throw std::invalid_argument("three_point: w must have even degree");

    ThreePointResult out;
    out.series = nv_zero(m.rank());
    out.series.trunc = Truncation{m.area, ctx.area_bound};

    Rational cup = cup_product_3(m, a1.value, a2.value, a3.value);
    if (cup != 0) out.series.poly[IntVec(m.rank(), 0)] = cup;

    // Candidate classes: the effective cone within the bound, every stored
    // genus-0 class (post-surgery tables can sit off the cone), and the flop
    // locus multiples carrying the covering tails.
    std::set<IntVec> candidates;
    for (const auto& v : enumerate_cone(m.rank(), m.effective_cone, m.area, ctx.area_bound))
        candidates.insert(v);
    for (const auto& [key, value] : table.entries) {
        (void)value;
        if (key.genus == 0 && dot(m.area, key.cls) <= ctx.area_bound) candidates.insert(key.cls);
    }
    for (const auto& locus : m.flop_loci) {
        Rational step = dot(m.area, locus.cls);
        IntVec expo = locus.cls;
        for (Rational a = step; a <= ctx.area_bound; a += step) {
            candidates.insert(expo);
            expo = vec_add(expo, locus.cls);
        }
    }

    const int j_max = ctx.w ? ctx.w_order : 0;
    for (const auto& cls : candidates) {
        if (is_zero(cls)) continue;
        Rational coeff = 0;
        for (int j = 0; j <= j_max; ++j) {
            std::vector<Insertion> ins = {a1, a2, a3};
            for (int i = 0; i < j; ++i) ins.push_back(*ctx.w);
            LookupResult r = lookup_extended(m, table, cls, 0, ins);
            coeff += r.value / factorial(j);
            for (auto& k : r.absent_keys) out.absent_keys.push_back(std::move(k));
        }
        detail::add_into(out.series.poly, cls, coeff);
    }

    for (const auto& locus : m.flop_loci) {
        auto cf = nv_closed_form(out.series, locus.cls);
        if (cf.recognized) out.series = std::move(cf.series);
    }
    return out;
}

}  // namespace gws
