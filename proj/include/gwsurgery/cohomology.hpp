#pragma once

// Graded cohomology data of a closed 3-fold model. Only even degrees are
// modeled; H4 is identified with H2 over Q by Poincare duality, so a
// degree-4 class is stored by its dual curve-class coordinates.

#include "gwsurgery/lattice.hpp"

#include <map>
#include <optional>
#include <string>

namespace gws {

struct CohClass {
    int degree = 0;  // one of 0, 2, 4, 6
    RatVec coords;
};

inline bool operator==(const CohClass& a, const CohClass& b) {
    return a.degree == b.degree && a.coords == b.coords;
}

struct FlopLocus {
    IntVec cls;        // class of the exceptional curves
    long long count = 0;  // number of exceptional curves in that class
};

struct ThreefoldModel {
    std::string name;
    int n = 2;  // complex fiber dimension parameter; dim_C = n + 1
    HomologyLattice lattice;
    long long h4_rank = 0;
    std::vector<Rational> triple;  // dense symmetric r^3 tensor on H^2
    IntVec c1;                     // integer functional on the lattice
    RatVec area;                   // rational functional on the lattice
    std::vector<IntVec> effective_cone;
    std::vector<FlopLocus> flop_loci;
    std::map<std::string, CohClass> classes;  // named insertion classes

    std::size_t rank() const { return static_cast<std::size_t>(lattice.rank); }
    const Rational& triple_at(std::size_t i, std::size_t j, std::size_t k) const {
        return triple[(i * rank() + j) * rank() + k];
    }
    bool is_calabi_yau() const {
        for (long long x : c1)
            if (x != 0) return false;
        return true;
    }
};

inline std::size_t graded_rank(const ThreefoldModel& m, int degree) {
    switch (degree) {
        case 0:
        case 6:
            return 1;
        case 2:
            return m.rank();
        case 4:
            return static_cast<std::size_t>(m.h4_rank);
        default:
            throw std::invalid_argument("cohomology: degree must be one of 0,2,4,6");
    }
}

inline void validate_class(const ThreefoldModel& m, const CohClass& a) {
    if (a.coords.size() != graded_rank(m, a.degree))
        throw std::invalid_argument("cohomology class: coordinate length mismatch");
}

inline void validate_model(const ThreefoldModel& m) {
    validate_lattice(m.lattice);
    const std::size_t r = m.rank();
    if (m.h4_rank != m.lattice.rank)
        throw std::invalid_argument("model: h4_rank must equal the lattice rank (Poincare duality)");
    if (m.triple.size() != r * r * r) throw std::invalid_argument("model: triple tensor size mismatch");
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t k = 0; k < r; ++k) {
                const Rational& t = m.triple_at(i, j, k);
                if (t != m.triple_at(i, k, j) || t != m.triple_at(j, i, k) ||
                    t != m.triple_at(k, j, i))
                    throw std::invalid_argument("model: triple tensor not symmetric");
            }
    if (m.c1.size() != r || m.area.size() != r)
        throw std::invalid_argument("model: c1/area functional length mismatch");
    for (const auto& g : m.effective_cone) {
        if (g.size() != r) throw std::invalid_argument("model: cone generator length mismatch");
        if (dot(m.area, g) <= 0)
            throw std::invalid_argument("model: area not strictly positive on a cone generator");
    }
    for (const auto& locus : m.flop_loci) {
        if (locus.cls.size() != r) throw std::invalid_argument("model: flop locus length mismatch");
        if (is_zero(locus.cls)) throw std::invalid_argument("model: flop locus class is zero");
        if (locus.count < 0) throw std::invalid_argument("model: flop locus count negative");
        // Bounded enumeration decides cone membership exactly.
        auto pts = enumerate_cone(r, m.effective_cone, m.area, dot(m.area, locus.cls));
        if (!std::binary_search(pts.begin(), pts.end(), locus.cls))
            throw std::invalid_argument("model: flop locus class not in the effective cone");
    }
    for (const auto& [name, cls] : m.classes) {
        if (name.empty()) throw std::invalid_argument("model: empty class name");
        validate_class(m, cls);
    }
}

// Trilinear contraction of the triple-intersection tensor (degree-2 inputs).
inline Rational cup3(const ThreefoldModel& m, const CohClass& a1, const CohClass& a2,
                     const CohClass& a3) {
    for (const CohClass* a : {&a1, &a2, &a3}) {
        if (a->degree != 2) throw std::invalid_argument("cup3: inputs must have degree 2");
        validate_class(m, *a);
    }
    const std::size_t r = m.rank();
    Rational s = 0;
    for (std::size_t i = 0; i < r; ++i) {
        if (a1.coords[i] == 0) continue;
        for (std::size_t j = 0; j < r; ++j) {
            if (a2.coords[j] == 0) continue;
            for (std::size_t k = 0; k < r; ++k)
                s += a1.coords[i] * a2.coords[j] * a3.coords[k] * m.triple_at(i, j, k);
        }
    }
    return s;
}

// Natural pairing of a divisor class with a curve class.
inline Rational divisor_pair(const CohClass& a, const IntVec& cls) {
    if (a.degree != 2) throw std::invalid_argument("divisor_pair: class must have degree 2");
    return dot(a.coords, cls);
}

// Classical cup product integrated over the 3-fold, for any even degrees.
// Zero unless the total degree is 6.
inline Rational cup_product_3(const ThreefoldModel& m, const CohClass& a1, const CohClass& a2,
                              const CohClass& a3) {
    for (const CohClass* a : {&a1, &a2, &a3}) {
        if (a->degree % 2 != 0) throw std::invalid_argument("cup product: odd degree");
        validate_class(m, *a);
    }
    if (a1.degree + a2.degree + a3.degree != 6) return 0;
    const CohClass* by_deg[3] = {&a1, &a2, &a3};
    std::sort(by_deg, by_deg + 3, [](const CohClass* x, const CohClass* y) { return x->degree < y->degree; });
    if (by_deg[0]->degree == 2) return cup3(m, a1, a2, a3);
    if (by_deg[2]->degree == 6)  // (0,0,6)
        return by_deg[0]->coords[0] * by_deg[1]->coords[0] * by_deg[2]->coords[0];
    // (0,2,4): h4 coordinates are the Poincare-dual curve class.
    Rational s = 0;
    for (std::size_t i = 0; i < m.rank(); ++i) s += by_deg[1]->coords[i] * by_deg[2]->coords[i];
    return by_deg[0]->coords[0] * s;
}

// Pullback data attached to a surgery map: on_h2 is the transpose of the H2
// matrix, on_h4 is the Poincare dual of a chosen inverse/right inverse.
struct CohPullback {
    RatMat on_h2;  // source.rank x target.rank
    RatMat on_h4;  // source.rank x target.rank
};

inline CohPullback make_pullback(const LatticeMap& m,
                                 std::optional<RatMat> h2_right_inverse = std::nullopt) {
    RatMat phi = rat_mat(m.matrix);
    RatMat r;
    if (h2_right_inverse) {
        r = *h2_right_inverse;
        if (r.rows != phi.cols || r.cols != phi.rows)
            throw std::invalid_argument("pullback: right inverse shape mismatch");
        if (!(mat_mul(phi, r) == RatMat::identity(phi.rows)))
            throw std::invalid_argument("pullback: supplied matrix is not a right inverse");
    } else if (m.kind == MapKind::iso) {
        auto inv = rat_inverse(phi);
        if (!inv) throw std::invalid_argument("pullback: iso matrix not invertible");
        r = *inv;
    } else {
        throw std::invalid_argument("pullback: a right inverse must be supplied for non-isos");
    }
    return CohPullback{transpose(phi), r};
}

inline CohClass pullback(const CohPullback& p, const CohClass& a) {
    switch (a.degree) {
        case 0:
        case 6:
            return a;
        case 2:
            return CohClass{2, mat_apply(p.on_h2, a.coords)};
        case 4:
            return CohClass{4, mat_apply(p.on_h4, a.coords)};
        default:
            throw std::invalid_argument("pullback: only even degrees 0,2,4,6 are modeled");
    }
}

}  // namespace gws
