#pragma once

// Integer lattices modeling H2 of the manifolds, and the surgery
// homomorphisms between them. Maps are explicit integer matrices; the kind
// tag is validated with exact linear algebra at construction.

#include "gwsurgery/linalg.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace gws {

struct HomologyLattice {
    long long rank = 0;
    std::vector<std::string> basis_labels;
    std::vector<IntVec> exceptional_classes;
};

inline void validate_lattice(const HomologyLattice& l) {
    if (l.rank <= 0) throw std::invalid_argument("lattice: rank must be positive");
    if (l.basis_labels.size() != static_cast<std::size_t>(l.rank))
        throw std::invalid_argument("lattice: basis_labels length != rank");
    std::set<std::string> seen(l.basis_labels.begin(), l.basis_labels.end());
    if (seen.size() != l.basis_labels.size())
        throw std::invalid_argument("lattice: basis_labels not pairwise distinct");
    for (const auto& g : l.exceptional_classes)
        if (g.size() != static_cast<std::size_t>(l.rank))
            throw std::invalid_argument("lattice: exceptional class of wrong length");
}

enum class MapKind { iso, surjection, injection };

struct LatticeMap {
    HomologyLattice source;
    HomologyLattice target;
    IntMat matrix;  // target.rank x source.rank
    MapKind kind = MapKind::iso;
};

inline void validate_map(const LatticeMap& m) {
    validate_lattice(m.source);
    validate_lattice(m.target);
    if (m.matrix.rows != static_cast<std::size_t>(m.target.rank) ||
        m.matrix.cols != static_cast<std::size_t>(m.source.rank))
        throw std::invalid_argument("lattice map: matrix shape mismatch");
    switch (m.kind) {
        case MapKind::iso: {
            if (m.matrix.rows != m.matrix.cols)
                throw std::invalid_argument("lattice map: iso must be square");
            BigInt d = int_det(m.matrix);
            if (d != 1 && d != -1)
                throw std::invalid_argument("lattice map: iso must be unimodular");
            break;
        }
        case MapKind::surjection:
            // A rational right inverse exists iff the rows are independent.
            if (int_rank(m.matrix) != m.matrix.rows)
                throw std::invalid_argument("lattice map: surjection must have full row rank");
            break;
        case MapKind::injection:
            if (int_rank(m.matrix) != m.matrix.cols)
                throw std::invalid_argument("lattice map: injection must have trivial kernel");
            break;
    }
}

inline IntVec apply_map(const LatticeMap& m, const IntVec& a) {
    if (a.size() != static_cast<std::size_t>(m.source.rank))
        throw std::invalid_argument("apply_map: class length != source rank");
    return mat_apply(m.matrix, a);
}

struct ClassCoset {
    IntVec representative;
    std::vector<IntVec> kernel_basis;
};

inline bool coset_contains(const ClassCoset& c, const IntVec& v) {
    if (v.size() != c.representative.size())
        throw std::invalid_argument("coset: class length mismatch");
    return solves_integrally(c.kernel_basis, vec_sub(v, c.representative));
}

inline bool coset_equal(const ClassCoset& c, const IntVec& a, const IntVec& b) {
    return solves_integrally(c.kernel_basis, vec_sub(a, b));
}

// Builds the flop isomorphism from an adapted basis: each paired exceptional
// class must literally be a standard basis vector, the map sends it to minus
// its partner and fixes the complementary basis vectors.
inline LatticeMap make_flop_map(const HomologyLattice& l, const HomologyLattice& lf,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairing) {
    validate_lattice(l);
    validate_lattice(lf);
    if (l.rank != lf.rank) throw std::invalid_argument("flop map: ranks differ");
    const std::size_t n = static_cast<std::size_t>(l.rank);

    auto unit_position = [](const IntVec& v) -> std::size_t {
        std::size_t pos = v.size();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            if (v[i] != 1 || pos != v.size())
                throw std::invalid_argument(
                    "flop map: exceptional class is not an adapted basis vector");
            pos = i;
        }
        if (pos == v.size())
            throw std::invalid_argument("flop map: exceptional class is zero");
        return pos;
    };

    IntMat m = IntMat::identity(n);
    std::set<std::size_t> used_src, used_tgt;
    for (auto [js, jt] : pairing) {
        if (js >= l.exceptional_classes.size() || jt >= lf.exceptional_classes.size())
            throw std::invalid_argument("flop map: pairing index is not an exceptional class");
        if (!used_src.insert(js).second || !used_tgt.insert(jt).second)
            throw std::invalid_argument("flop map: pairing is not injective");
        std::size_t ps = unit_position(l.exceptional_classes[js]);
        std::size_t pt = unit_position(lf.exceptional_classes[jt]);
        for (std::size_t i = 0; i < n; ++i) m(i, ps) = 0;
        m(pt, ps) = -1;
    }

    LatticeMap out{l, lf, std::move(m), MapKind::iso};
    validate_map(out);
    return out;
}

// All non-negative integer combinations of the cone generators with
// area <= bound. Generators may be dependent; points are emitted once.
// Includes the zero class.
inline std::vector<IntVec> enumerate_cone(std::size_t dim, const std::vector<IntVec>& cone,
                                          const RatVec& area, const Rational& bound) {
    for (const auto& g : cone) {
        if (g.size() != dim) throw std::invalid_argument("cone generator of wrong length");
        if (dot(area, g) <= 0)
            throw std::invalid_argument("cone enumeration: area not strictly positive on a generator");
    }
    if (bound < 0) throw std::invalid_argument("cone enumeration: negative area bound");

    std::set<IntVec> seen;
    std::vector<std::pair<IntVec, Rational>> stack;
    stack.push_back({IntVec(dim, 0), Rational(0)});
    seen.insert(IntVec(dim, 0));
    std::size_t head = 0;
    std::vector<IntVec> out;
    while (head < stack.size()) {
        auto [v, a] = stack[head++];
        out.push_back(v);
        for (const auto& g : cone) {
            Rational na = a + dot(area, g);
            if (na > bound) continue;
            IntVec nv = vec_add(v, g);
            if (seen.insert(nv).second) stack.push_back({nv, na});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Fiber of a surjection over b, cut down to the effective cone and an area
// bound so the set is finite. Complete within those constraints.
inline std::vector<IntVec> fiber_classes(const LatticeMap& m, const IntVec& b, const RatVec& area,
                                         const Rational& bound, const std::vector<IntVec>& cone) {
    if (m.kind != MapKind::surjection && m.kind != MapKind::iso)
        throw std::invalid_argument("fiber_classes: map must be a surjection");
    if (b.size() != static_cast<std::size_t>(m.target.rank))
        throw std::invalid_argument("fiber_classes: target class length mismatch");
    std::vector<IntVec> out;
    for (const auto& v : enumerate_cone(static_cast<std::size_t>(m.source.rank), cone, area, bound))
        if (mat_apply(m.matrix, v) == b) out.push_back(v);
    return out;
}

}  // namespace gws
