#pragma once

// Degeneration combinatorics across a symplectic cut: enumeration of
// splitting types, Fredholm index bookkeeping, the dimension-deficit
// vanishing filter, and evaluation of the gluing sum that contracts side
// log invariants through the intersection matrix of Z.

#include "gwsurgery/gw_tables.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace gws {

struct ZModel {
    std::vector<std::string> basis;
    RatMat pairing;          // delta_ab
    RatMat inverse_pairing;  // delta^ab
};

inline void validate_z_model(const ZModel& z) {
    const std::size_t n = z.basis.size();
    if (z.pairing.rows != n || z.pairing.cols != n || z.inverse_pairing.rows != n ||
        z.inverse_pairing.cols != n)
        throw std::invalid_argument("z model: pairing shape mismatch");
    if (!(mat_mul(z.pairing, z.inverse_pairing) == RatMat::identity(n)))
        throw std::invalid_argument("z model: inverse_pairing is not the inverse of pairing");
}

struct CutModel {
    ThreefoldModel plus_model;
    ThreefoldModel minus_model;
    IntVec z_star_plus;   // pairing Z*(.) on the plus lattice
    IntVec z_star_minus;  // pairing Z*(.) on the minus lattice
    LatticeMap assembly;  // (H2+ (+) H2-) -> H2 of the glued manifold
    std::vector<IntVec> kernel_basis;  // ker pi_* in the glued lattice
    int n = 2;
};

inline void validate_cut_model(const CutModel& c) {
    validate_model(c.plus_model);
    validate_model(c.minus_model);
    if (c.z_star_plus.size() != c.plus_model.rank() ||
        c.z_star_minus.size() != c.minus_model.rank())
        throw std::invalid_argument("cut model: z_star length mismatch");
    if (c.assembly.matrix.cols != c.plus_model.rank() + c.minus_model.rank())
        throw std::invalid_argument("cut model: assembly source rank must be rank+ + rank-");
    for (const auto& k : c.kernel_basis)
        if (k.size() != c.assembly.matrix.rows)
            throw std::invalid_argument("cut model: kernel basis vector of wrong length");
}

enum class Side { plus, minus };

struct SplittingComponent {
    Side side = Side::plus;
    IntVec cls;
    int genus = 0;
    int marks = 0;
    std::vector<int> ends;  // contact multiplicities, canonical: descending

    auto tie() const { return std::tie(cls, genus, marks, ends); }
    bool operator<(const SplittingComponent& o) const { return tie() < o.tie(); }
    bool operator==(const SplittingComponent& o) const { return side == o.side && tie() == o.tie(); }
};

// An edge multiset between plus component p and minus component q with
// contact multiplicity k; identical ends of a component are interchangeable,
// so the edge multiset determines the matching up to symmetry.
using Matching = std::map<std::tuple<int, int, int>, int>;

struct SplittingType {
    std::vector<SplittingComponent> plus_components;
    std::vector<SplittingComponent> minus_components;
    Matching matching;

    int matched_pairs() const {
        int nu = 0;
        for (const auto& [edge, count] : matching) {
            (void)edge;
            nu += count;
        }
        return nu;
    }
    int component_count() const {
        return static_cast<int>(plus_components.size() + minus_components.size());
    }
    int total_genus() const {
        int g = 0;
        for (const auto& c : plus_components) g += c.genus;
        for (const auto& c : minus_components) g += c.genus;
        return g + matched_pairs() - component_count() + 1;
    }
    int total_marks() const {
        int m = 0;
        for (const auto& c : plus_components) m += c.marks;
        for (const auto& c : minus_components) m += c.marks;
        return m;
    }
};

namespace detail {

inline std::vector<std::vector<int>> partitions(int total) {
    // All multisets of positive integers summing to total, descending order.
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int rest, int max_part) -> void {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = std::min(rest, max_part); p >= 1; --p) {
            cur.push_back(p);
            self(self, rest - p, p);
            cur.pop_back();
        }
    };
    rec(rec, total, total);
    return out;
}

inline std::map<int, int> end_counts(const SplittingComponent& c) {
    std::map<int, int> m;
    for (int k : c.ends) ++m[k];
    return m;
}

inline bool matching_connected(const SplittingType& t) {
    const int l = t.component_count();
    if (l == 1) return true;
    std::vector<int> parent(l);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const int lp = static_cast<int>(t.plus_components.size());
    for (const auto& [edge, count] : t.matching) {
        (void)count;
        int a = std::get<0>(edge);
        int b = lp + std::get<1>(edge);
        parent[find(a)] = find(b);
    }
    int root = find(0);
    for (int i = 1; i < l; ++i)
        if (find(i) != root) return false;
    return true;
}

inline IntVec assembled_class(const CutModel& cut, const SplittingType& t) {
    IntVec plus_sum(cut.plus_model.rank(), 0);
    for (const auto& c : t.plus_components) plus_sum = vec_add(plus_sum, c.cls);
    IntVec minus_sum(cut.minus_model.rank(), 0);
    for (const auto& c : t.minus_components) minus_sum = vec_add(minus_sum, c.cls);
    IntVec joint = plus_sum;
    joint.insert(joint.end(), minus_sum.begin(), minus_sum.end());
    return mat_apply(cut.assembly.matrix, joint);
}

}  // namespace detail

inline void validate_splitting_component(const CutModel& cut, const SplittingComponent& c) {
    const IntVec& z = (c.side == Side::plus) ? cut.z_star_plus : cut.z_star_minus;
    if (c.cls.size() != z.size())
        throw std::invalid_argument("splitting component: class length mismatch");
    if (is_zero(c.cls)) throw std::invalid_argument("splitting component: zero class");
    if (c.genus < 0 || c.marks < 0)
        throw std::invalid_argument("splitting component: negative genus or marks");
    long long total = 0;
    for (int k : c.ends) {
        if (k <= 0) throw std::invalid_argument("splitting component: non-positive end multiplicity");
        total += k;
    }
    if (total != dot(z, c.cls))
        throw std::invalid_argument("splitting component: ends do not sum to Z*(A)");
}

inline void validate_splitting_type(const CutModel& cut, const SplittingType& t,
                                    const ClassCoset& target, int genus, int marks) {
    if (t.plus_components.empty() && t.minus_components.empty())
        throw std::invalid_argument("splitting type: no components");
    for (const auto& c : t.plus_components) validate_splitting_component(cut, c);
    for (const auto& c : t.minus_components) validate_splitting_component(cut, c);
    // Edges must be consistent with the per-component end multisets.
    std::vector<std::map<int, int>> plus_left, minus_left;
    for (const auto& c : t.plus_components) plus_left.push_back(detail::end_counts(c));
    for (const auto& c : t.minus_components) minus_left.push_back(detail::end_counts(c));
    for (const auto& [edge, count] : t.matching) {
        auto [p, q, k] = edge;
        if (p < 0 || p >= static_cast<int>(t.plus_components.size()) || q < 0 ||
            q >= static_cast<int>(t.minus_components.size()) || count <= 0)
            throw std::invalid_argument("splitting type: malformed matching edge");
        plus_left[p][k] -= count;
        minus_left[q][k] -= count;
    }
    for (const auto& side : {plus_left, minus_left})
        for (const auto& counts : side)
            for (const auto& [k, left] : counts) {
                (void)k;
                if (left != 0)
                    throw std::invalid_argument("splitting type: matching does not exhaust the ends");
            }
    if (!detail::matching_connected(t))
        throw std::invalid_argument("splitting type: matching graph is not connected");
    if (t.total_genus() != genus) throw std::invalid_argument("splitting type: genus formula violated");
    if (t.total_marks() != marks) throw std::invalid_argument("splitting type: marks do not sum to m");
    if (!coset_contains(target, detail::assembled_class(cut, t)))
        throw std::invalid_argument("splitting type: assembled class misses the target coset");
}

namespace detail {

// Canonical de-duplication signature: components sorted per side; the
// matching matrix minimized over permutations of identical components.
inline std::string splitting_signature(SplittingType t) {
    auto sort_side = [](std::vector<SplittingComponent>& comps, Matching& matching, bool is_plus) {
        std::vector<int> order(comps.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return comps[a] < comps[b]; });
        std::vector<int> rank(comps.size());
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
        std::vector<SplittingComponent> sorted;
        for (int idx : order) sorted.push_back(comps[idx]);
        comps = std::move(sorted);
        Matching renamed;
        for (const auto& [edge, count] : matching) {
            auto [p, q, k] = edge;
            if (is_plus)
                renamed[{rank[p], q, k}] += count;
            else
                renamed[{p, rank[q], k}] += count;
        }
        matching = std::move(renamed);
    };
    sort_side(t.plus_components, t.matching, true);
    sort_side(t.minus_components, t.matching, false);

    // Group identical components; minimize the matching over in-group swaps.
    auto groups = [](const std::vector<SplittingComponent>& comps) {
        std::vector<std::pair<int, int>> out;  // [begin, end)
        std::size_t i = 0;
        while (i < comps.size()) {
            std::size_t j = i + 1;
            while (j < comps.size() && comps[j] == comps[i]) ++j;
            out.push_back({static_cast<int>(i), static_cast<int>(j)});
            i = j;
        }
        return out;
    };
    auto plus_groups = groups(t.plus_components);
    auto minus_groups = groups(t.minus_components);

    auto render = [&](const Matching& m) {
        std::ostringstream os;
        for (const auto& [edge, count] : m)
            os << std::get<0>(edge) << "." << std::get<1>(edge) << "." << std::get<2>(edge) << "x"
               << count << ";";
        return os.str();
    };

    std::string best;
    std::vector<int> plus_perm(t.plus_components.size());
    std::iota(plus_perm.begin(), plus_perm.end(), 0);
    std::vector<int> minus_perm(t.minus_components.size());
    std::iota(minus_perm.begin(), minus_perm.end(), 0);

    auto try_perm = [&]() {
        Matching renamed;
        for (const auto& [edge, count] : t.matching) {
            auto [p, q, k] = edge;
            renamed[{plus_perm[p], minus_perm[q], k}] += count;
        }
        std::string r = render(renamed);
        if (best.empty() || r < best) best = r;
    };

    auto permute_groups = [&](auto&& self, std::vector<int>& perm,
                              const std::vector<std::pair<int, int>>& grps, std::size_t gi,
                              const std::function<void()>& inner) -> void {
        if (gi == grps.size()) {
            inner();
            return;
        }
        auto [b, e] = grps[gi];
        std::vector<int> slice(perm.begin() + b, perm.begin() + e);
        std::sort(slice.begin(), slice.end());
        do {
            for (int i = b; i < e; ++i) perm[i] = slice[i - b];
            self(self, perm, grps, gi + 1, inner);
        } while (std::next_permutation(slice.begin(), slice.end()));
    };

    std::function<void()> over_minus = [&]() {
        permute_groups(permute_groups, minus_perm, minus_groups, 0, std::function<void()>(try_perm));
    };
    permute_groups(permute_groups, plus_perm, plus_groups, 0, over_minus);

    std::ostringstream os;
    for (const auto& c : t.plus_components) {
        os << "+" << render_vec(c.cls) << "g" << c.genus << "m" << c.marks << "e[";
        for (int k : c.ends) os << k << ",";
        os << "]";
    }
    for (const auto& c : t.minus_components) {
        os << "-" << render_vec(c.cls) << "g" << c.genus << "m" << c.marks << "e[";
        for (int k : c.ends) os << k << ",";
        os << "]";
    }
    os << "|" << best;
    return os.str();
}

struct Prototype {
    IntVec cls;
    std::vector<int> ends;
    Rational area;
};

inline std::vector<Prototype> side_prototypes(const ThreefoldModel& model, const IntVec& z_star,
                                              const Rational& bound) {
    std::vector<Prototype> out;
    for (const auto& cls : enumerate_cone(model.rank(), model.effective_cone, model.area, bound)) {
        if (is_zero(cls)) continue;
        long long kz = dot(z_star, cls);
        if (kz < 0) continue;
        Rational area = dot(model.area, cls);
        if (kz == 0) {
            out.push_back({cls, {}, area});
        } else if (kz <= 64) {  // partitions explode beyond that; desk scale
            for (auto& p : partitions(static_cast<int>(kz))) out.push_back({cls, p, area});
        } else {
            throw std::invalid_argument("enumerate_splittings: Z*(A) too large to partition");
        }
    }
    return out;
}

// Multisets of prototype indices with total area <= budget.
inline void multisets_within(const std::vector<Prototype>& protos, const Rational& budget,
                             std::size_t from, std::vector<int>& cur,
                             const std::function<void(const std::vector<int>&, const Rational&)>& emit) {
    emit(cur, budget);
    for (std::size_t i = from; i < protos.size(); ++i) {
        if (protos[i].area > budget) continue;
        cur.push_back(static_cast<int>(i));
        multisets_within(protos, budget - protos[i].area, i, cur, emit);
        cur.pop_back();
    }
}

// All ways to distribute `total` over `slots` bins.
inline std::vector<std::vector<int>> compositions(int total, int slots) {
    std::vector<std::vector<int>> out;
    if (slots == 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    std::vector<int> cur(slots, 0);
    auto rec = [&](auto&& self, int idx, int rest) -> void {
        if (idx == slots - 1) {
            cur[idx] = rest;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            cur[idx] = v;
            self(self, idx + 1, rest - v);
        }
    };
    rec(rec, 0, total);
    return out;
}

// Enumerates matchings at the edge-multiset level: distribute every plus
// component's k-ends over minus components with matching capacity.
inline void enumerate_matchings(const std::vector<SplittingComponent>& plus,
                                const std::vector<SplittingComponent>& minus,
                                const std::function<void(const Matching&)>& emit) {
    // remaining capacity per minus component per multiplicity
    std::vector<std::map<int, int>> cap;
    for (const auto& c : minus) cap.push_back(end_counts(c));
    std::vector<std::pair<std::pair<int, int>, int>> demands;  // ((plus comp, k), count)
    for (std::size_t i = 0; i < plus.size(); ++i)
        for (const auto& [k, count] : end_counts(plus[i]))
            demands.push_back({{static_cast<int>(i), k}, count});
    Matching current;
    auto rec = [&](auto&& self, std::size_t d) -> void {
        if (d == demands.size()) {
            emit(current);
            return;
        }
        auto [pk, need] = demands[d];
        auto [p, k] = pk;
        // distribute `need` ends of multiplicity k over minus components
        auto place = [&](auto&& pl, std::size_t j, int rest) -> void {
            if (j == cap.size()) {
                if (rest == 0) self(self, d + 1);
                return;
            }
            int avail = cap[j].count(k) ? cap[j][k] : 0;
            for (int take = std::min(avail, rest); take >= 0; --take) {
                if (take > 0) {
                    cap[j][k] -= take;
                    current[{p, static_cast<int>(j), k}] += take;
                }
                pl(pl, j + 1, rest - take);
                if (take > 0) {
                    cap[j][k] += take;
                    auto it = current.find({p, static_cast<int>(j), k});
                    it->second -= take;
                    if (it->second == 0) current.erase(it);
                }
            }
        };
        place(place, 0, need);
    };
    rec(rec, 0);
}

}  // namespace detail

// Complete enumeration of splitting types for the target coset within the
// area budget: side classes effective and nonzero, ends partitioning Z*(A),
// matchings at the edge-multiset level, connected, genus formula satisfied,
// duplicates (up to matching symmetry) emitted once.
inline std::vector<SplittingType> enumerate_splittings(const CutModel& cut, const ClassCoset& target,
                                                       int genus, int marks,
                                                       const Rational& area_bound) {
    validate_cut_model(cut);
    if (area_bound <= 0) throw std::invalid_argument("enumerate_splittings: area bound must be positive");
    if (genus < 0 || marks < 0)
        throw std::invalid_argument("enumerate_splittings: genus and marks must be non-negative");

    auto plus_protos = detail::side_prototypes(cut.plus_model, cut.z_star_plus, area_bound);
    auto minus_protos = detail::side_prototypes(cut.minus_model, cut.z_star_minus, area_bound);

    std::vector<SplittingType> out;
    std::set<std::string> seen;

    std::vector<int> plus_pick;
    detail::multisets_within(
        plus_protos, area_bound, 0, plus_pick,
        [&](const std::vector<int>& plus_sel, const Rational& rest) {
            std::vector<int> minus_pick;
            detail::multisets_within(
                minus_protos, rest, 0, minus_pick,
                [&](const std::vector<int>& minus_sel, const Rational&) {
                    const int lp = static_cast<int>(plus_sel.size());
                    const int lm = static_cast<int>(minus_sel.size());
                    const int l = lp + lm;
                    if (l == 0) return;
                    // end multisets must agree across the cut
                    std::map<int, int> plus_ends, minus_ends;
                    int nu = 0;
                    for (int i : plus_sel)
                        for (int k : plus_protos[i].ends) {
                            ++plus_ends[k];
                            ++nu;
                        }
                    for (int i : minus_sel)
                        for (int k : minus_protos[i].ends) ++minus_ends[k];
                    if (plus_ends != minus_ends) return;
                    if (lp > 0 && lm > 0 && nu == 0) return;  // cannot connect
                    if (lp == 0 || lm == 0) {
                        if (l != 1 || nu != 0) return;  // pure types are single components
                    }
                    const int base_genus = genus - nu + l - 1;
                    if (base_genus < 0) return;

                    SplittingType skel;
                    for (int i : plus_sel)
                        skel.plus_components.push_back(
                            SplittingComponent{Side::plus, plus_protos[i].cls, 0, 0, plus_protos[i].ends});
                    for (int i : minus_sel)
                        skel.minus_components.push_back(SplittingComponent{
                            Side::minus, minus_protos[i].cls, 0, 0, minus_protos[i].ends});
                    if (!coset_contains(target, detail::assembled_class(cut, skel))) return;

                    for (const auto& gdist : detail::compositions(base_genus, l))
                        for (const auto& mdist : detail::compositions(marks, l)) {
                            SplittingType t = skel;
                            for (int i = 0; i < lp; ++i) {
                                t.plus_components[i].genus = gdist[i];
                                t.plus_components[i].marks = mdist[i];
                            }
                            for (int i = 0; i < lm; ++i) {
                                t.minus_components[i].genus = gdist[lp + i];
                                t.minus_components[i].marks = mdist[lp + i];
                            }
                            detail::enumerate_matchings(
                                t.plus_components, t.minus_components, [&](const Matching& match) {
                                    SplittingType full = t;
                                    full.matching = match;
                                    if (!detail::matching_connected(full)) return;
                                    std::string sig = detail::splitting_signature(full);
                                    if (!seen.insert(sig).second) return;
                                    validate_splitting_type(cut, full, target, genus, marks);
                                    out.push_back(std::move(full));
                                });
                        }
                });
        });

    std::sort(out.begin(), out.end(), [](const SplittingType& a, const SplittingType& b) {
        return detail::splitting_signature(a) < detail::splitting_signature(b);
    });
    return out;
}

// Index of the deformation operator of a closed stable map.
inline long long index_closed(long long c1_of_class, int genus, int n) {
    if (genus < 0) throw std::invalid_argument("index: negative genus");
    return 2 * c1_of_class + (n + 1) * (2 - 2 * static_cast<long long>(genus)) + 6 * genus - 6;
}

// Index of one side component with prescribed contact orders; consistent
// with the addition formula across the cut (each end contributes 2 - 2k).
inline long long index_log(const SplittingComponent& comp, const IntVec& c1_side, int n) {
    long long idx = 2 * dot(c1_side, comp.cls) +
                    (n + 1) * (2 - 2 * static_cast<long long>(comp.genus)) + 6 * comp.genus - 6;
    for (int k : comp.ends) idx += 2 - 2 * static_cast<long long>(k);
    return idx;
}

// The closed single-end form 2(C1 - k + 1) covers exactly the genus-0
// one-end components; everything else gets the additivity-derived value
// above. Callers that care report the distinction.
inline bool single_end_index_form(const SplittingComponent& comp) {
    return comp.genus == 0 && comp.ends.size() == 1;
}

// Dimension-deficit vanishing: a mixed type dies when the index available on
// the side carrying the insertions is smaller than the total insertion
// degree. Pure types are untouched.
inline std::vector<SplittingType> vanishing_filter(const CutModel& cut,
                                                   const std::vector<SplittingType>& types,
                                                   const std::vector<int>& insertion_degrees,
                                                   Side support_side) {
    long long total_degree = 0;
    for (int d : insertion_degrees) {
        if (d < 0 || d % 2 != 0)
            throw std::invalid_argument("vanishing filter: insertion degrees must be even");
        total_degree += d;
    }
    std::vector<SplittingType> out;
    for (const auto& t : types) {
        const bool mixed = !t.plus_components.empty() && !t.minus_components.empty();
        if (mixed) {
            long long side_index = 0;
            if (support_side == Side::plus)
                for (const auto& c : t.plus_components)
                    side_index += index_log(c, cut.plus_model.c1, cut.n);
            else
                for (const auto& c : t.minus_components)
                    side_index += index_log(c, cut.minus_model.c1, cut.n);
            if (side_index < total_degree) continue;
        }
        out.push_back(t);
    }
    return out;
}

struct GluingSumResult {
    Rational value = 0;
    std::vector<LogKey> absent_keys;
};

// Evaluates one splitting type: |k| times the contraction of side log
// invariants through the inverse intersection matrix, one Z-basis slot per
// matched end. Multi-component sides multiply their component invariants.
// Interior insertions are given per component, already split across the cut.
inline GluingSumResult gluing_sum(const CutModel& cut, const ZModel& z, const SplittingType& type,
                                  const LogGWTable& plus_table, const LogGWTable& minus_table,
                                  const std::vector<std::vector<std::string>>& plus_insertions,
                                  const std::vector<std::vector<std::string>>& minus_insertions) {
    validate_z_model(z);
    for (const auto& c : type.plus_components) validate_splitting_component(cut, c);
    for (const auto& c : type.minus_components) validate_splitting_component(cut, c);
    if (plus_insertions.size() != type.plus_components.size() ||
        minus_insertions.size() != type.minus_components.size())
        throw std::invalid_argument("gluing sum: insertion lists do not match the components");
    for (std::size_t i = 0; i < plus_insertions.size(); ++i)
        if (plus_insertions[i].size() != static_cast<std::size_t>(type.plus_components[i].marks))
            throw std::invalid_argument("gluing sum: plus insertion count != marks");
    for (std::size_t i = 0; i < minus_insertions.size(); ++i)
        if (minus_insertions[i].size() != static_cast<std::size_t>(type.minus_components[i].marks))
            throw std::invalid_argument("gluing sum: minus insertion count != marks");

    // Expand the edge multiset into ordered slots.
    struct Slot {
        int plus_comp;
        int minus_comp;
        int multiplicity;
    };
    std::vector<Slot> slots;
    Rational k_factor = 1;
    for (const auto& [edge, count] : type.matching) {
        auto [p, q, k] = edge;
        for (int c = 0; c < count; ++c) {
            slots.push_back({p, q, k});
            k_factor *= k;
        }
    }
    const std::size_t nu = slots.size();
    const std::size_t nb = z.basis.size();

    GluingSumResult res;

    auto side_value = [&](Side side, const std::vector<std::size_t>& basis_choice) -> Rational {
        const auto& comps = (side == Side::plus) ? type.plus_components : type.minus_components;
        const auto& table = (side == Side::plus) ? plus_table : minus_table;
        const auto& ins = (side == Side::plus) ? plus_insertions : minus_insertions;
        Rational prod = 1;
        for (std::size_t ci = 0; ci < comps.size(); ++ci) {
            std::vector<LogEnd> ends;
            for (std::size_t si = 0; si < nu; ++si) {
                int comp_of_slot = (side == Side::plus) ? slots[si].plus_comp : slots[si].minus_comp;
                if (comp_of_slot == static_cast<int>(ci))
                    ends.push_back(LogEnd{slots[si].multiplicity, static_cast<int>(basis_choice[si])});
            }
            LogKey key = make_log_key(comps[ci].cls, comps[ci].genus, std::move(ends), ins[ci]);
            LogLookupResult r = log_lookup(table, key);
            if (r.absent)
                for (auto& k : r.absent_keys) res.absent_keys.push_back(std::move(k));
            prod *= r.value;
            if (prod == 0) return prod;
        }
        return prod;
    };

    if (nu == 0) {
        res.value = side_value(Side::plus, {}) * side_value(Side::minus, {});
        return res;
    }

    // Minus tensor over all basis multi-indices, then slot-by-slot
    // contraction with the inverse pairing, then the plus sum.
    std::size_t volume = 1;
    for (std::size_t i = 0; i < nu; ++i) volume *= nb;
    std::vector<Rational> minus_tensor(volume, Rational(0));
    std::vector<std::size_t> idx(nu, 0);
    for (std::size_t flat = 0; flat < volume; ++flat) {
        minus_tensor[flat] = side_value(Side::minus, idx);
        for (std::size_t d = 0; d < nu; ++d) {
            if (++idx[d] < nb) break;
            idx[d] = 0;
        }
    }
    for (std::size_t slot = 0; slot < nu; ++slot) {
        std::vector<Rational> next(volume, Rational(0));
        std::size_t stride = 1;
        for (std::size_t d = 0; d < slot; ++d) stride *= nb;
        for (std::size_t flat = 0; flat < volume; ++flat) {
            std::size_t j = (flat / stride) % nb;
            if (minus_tensor[flat] == 0) continue;
            std::size_t base = flat - j * stride;
            for (std::size_t i = 0; i < nb; ++i) {
                if (z.inverse_pairing(i, j) == 0) continue;
                next[base + i * stride] += z.inverse_pairing(i, j) * minus_tensor[flat];
            }
        }
        minus_tensor = std::move(next);
    }
    std::fill(idx.begin(), idx.end(), 0);
    Rational total = 0;
    for (std::size_t flat = 0; flat < volume; ++flat) {
        if (minus_tensor[flat] != 0) {
            Rational pv = side_value(Side::plus, idx);
            total += pv * minus_tensor[flat];
        }
        for (std::size_t d = 0; d < nu; ++d) {
            if (++idx[d] < nb) break;
            idx[d] = 0;
        }
    }
    res.value = k_factor * total;
    return res;
}

struct SideInsertions {
    std::vector<std::string> plus;   // names on the plus model
    std::vector<std::string> minus;  // names on the minus model
};

struct TypeContribution {
    SplittingType type;
    Rational value;
};

struct TotalInvariantResult {
    Rational total = 0;
    std::vector<TypeContribution> breakdown;
    std::vector<LogKey> absent_keys;
};

namespace detail {
// All ways to deal the labeled insertion list into per-component hands of
// the prescribed sizes.
inline void deal_insertions(const std::vector<std::string>& items, const std::vector<int>& sizes,
                            std::size_t comp, std::vector<std::vector<std::string>>& hands,
                            std::vector<bool>& used,
                            const std::function<void(const std::vector<std::vector<std::string>>&)>& emit) {
    if (comp == sizes.size()) {
        emit(hands);
        return;
    }
    // choose sizes[comp] unused indices, ascending, to avoid double counting
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (pick.size() == static_cast<std::size_t>(sizes[comp])) {
            for (std::size_t i : pick) {
                hands[comp].push_back(items[i]);
                used[i] = true;
            }
            deal_insertions(items, sizes, comp + 1, hands, used, emit);
            for (std::size_t i : pick) used[i] = false;
            hands[comp].clear();
            return;
        }
        for (std::size_t i = from; i < items.size(); ++i) {
            if (used[i]) continue;
            pick.push_back(i);
            self(self, i + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
}
}  // namespace detail

// Sum of gluing contributions over all (or the supplied) splitting types:
// pure one-side types contribute their bare log invariant, mixed types the
// contracted product. Labeled marked points are dealt to components in every
// admissible way.
inline TotalInvariantResult total_invariant(const CutModel& cut, const ZModel& z,
                                            const ClassCoset& target, int genus,
                                            const LogGWTable& plus_table,
                                            const LogGWTable& minus_table,
                                            const SideInsertions& insertions,
                                            const Rational& area_bound,
                                            const std::vector<SplittingType>* types = nullptr) {
    const int marks = static_cast<int>(insertions.plus.size() + insertions.minus.size());
    std::vector<SplittingType> enumerated;
    if (!types) {
        enumerated = enumerate_splittings(cut, target, genus, marks, area_bound);
        types = &enumerated;
    }
    TotalInvariantResult res;
    for (const auto& t : *types) {
        int plus_marks = 0, minus_marks = 0;
        std::vector<int> plus_sizes, minus_sizes;
        for (const auto& c : t.plus_components) {
            plus_marks += c.marks;
            plus_sizes.push_back(c.marks);
        }
        for (const auto& c : t.minus_components) {
            minus_marks += c.marks;
            minus_sizes.push_back(c.marks);
        }
        if (plus_marks != static_cast<int>(insertions.plus.size()) ||
            minus_marks != static_cast<int>(insertions.minus.size()))
            continue;  // insertions are side-supported; other deals vanish

        Rational type_value = 0;
        std::vector<std::vector<std::string>> plus_hands(plus_sizes.size());
        std::vector<bool> plus_used(insertions.plus.size(), false);
        detail::deal_insertions(
            insertions.plus, plus_sizes, 0, plus_hands, plus_used,
            [&](const std::vector<std::vector<std::string>>& ph) {
                std::vector<std::vector<std::string>> minus_hands(minus_sizes.size());
                std::vector<bool> minus_used(insertions.minus.size(), false);
                detail::deal_insertions(
                    insertions.minus, minus_sizes, 0, minus_hands, minus_used,
                    [&](const std::vector<std::vector<std::string>>& mh) {
                        GluingSumResult g = gluing_sum(cut, z, t, plus_table, minus_table, ph, mh);
                        type_value += g.value;
                        for (auto& k : g.absent_keys) res.absent_keys.push_back(std::move(k));
                    });
            });
        res.total += type_value;
        res.breakdown.push_back(TypeContribution{t, type_value});
    }
    std::sort(res.absent_keys.begin(), res.absent_keys.end());
    res.absent_keys.erase(std::unique(res.absent_keys.begin(), res.absent_keys.end()),
                          res.absent_keys.end());
    return res;
}

struct AbsoluteConsistency {
    Rational glued_sum = 0;   // sum over the coset of absolute invariants
    Rational total = 0;       // the gluing-side total
    bool equal = false;
    bool any_entry = false;
};

// Optional cross-check against a supplied absolute table of the glued
// manifold: the coset sum of absolute invariants should reproduce the glued
// total. Reported, never assumed.
inline AbsoluteConsistency check_absolute_consistency(const ThreefoldModel& glued_model,
                                                      const GWTable& absolute_table,
                                                      const ClassCoset& target, int genus,
                                                      const std::vector<std::string>& insertion_names,
                                                      const Rational& area_bound,
                                                      const Rational& computed_total) {
    AbsoluteConsistency out;
    out.total = computed_total;
    std::vector<Insertion> ins;
    for (const auto& n : insertion_names) ins.push_back(named_insertion(glued_model, n));
    std::set<IntVec> candidates;
    for (const auto& v :
         enumerate_cone(glued_model.rank(), glued_model.effective_cone, glued_model.area, area_bound))
        candidates.insert(v);
    for (const auto& [key, value] : absolute_table.entries) {
        (void)value;
        candidates.insert(key.cls);
    }
    for (const auto& cls : candidates) {
        if (is_zero(cls)) continue;
        if (!coset_contains(target, cls)) continue;
        LookupResult r = lookup_extended(glued_model, absolute_table, cls, genus, ins);
        if (!r.absent) out.any_entry = true;
        out.glued_sum += r.value;
    }
    out.equal = out.glued_sum == out.total;
    return out;
}

}  // namespace gws
