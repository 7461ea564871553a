#pragma once

// The flop and small-transition transforms on GW tables, and executable
// verification that the quantum 3-point functions match across the surgery
// after the change of formal variable q^A -> q^{phi(A)}.

#include "gwsurgery/quantum.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>

namespace gws {

enum class SurgeryKind { flop, transition };

struct FlopLocusPair {
    IntVec source_cls;
    IntVec target_cls;
    long long count = 0;
};

struct SurgerySetup {
    SurgeryKind kind = SurgeryKind::flop;
    ThreefoldModel source;
    ThreefoldModel target;
    LatticeMap h2_map;
    CohPullback pullback;
    std::vector<FlopLocusPair> locus_pairs;
};

inline void validate_setup(const SurgerySetup& s) {
    validate_model(s.source);
    validate_model(s.target);
    validate_map(s.h2_map);
    if (s.h2_map.source.rank != s.source.lattice.rank ||
        s.h2_map.target.rank != s.target.lattice.rank)
        throw std::invalid_argument("surgery: map ranks do not match the models");
    if (s.kind == SurgeryKind::flop) {
        if (s.h2_map.kind != MapKind::iso)
            throw std::invalid_argument("surgery: flop map must be an isomorphism");
        for (const auto& p : s.locus_pairs) {
            if (apply_map(s.h2_map, p.source_cls) != vec_neg(p.target_cls))
                throw std::invalid_argument("surgery: flop map must send each locus to minus its partner");
            auto has = [](const ThreefoldModel& m, const IntVec& cls, long long count) {
                for (const auto& l : m.flop_loci)
                    if (l.cls == cls && l.count == count) return true;
                return false;
            };
            if (!has(s.source, p.source_cls, p.count) || !has(s.target, p.target_cls, p.count))
                throw std::invalid_argument("surgery: locus pair not recorded on both models");
        }
    } else {
        if (s.h2_map.kind != MapKind::surjection)
            throw std::invalid_argument("surgery: transition map must be a surjection");
        if (!s.target.flop_loci.empty())
            throw std::invalid_argument("surgery: transition target must carry no flop loci");
        for (const auto& locus : s.source.flop_loci)
            if (!is_zero(apply_map(s.h2_map, locus.cls)))
                throw std::invalid_argument("surgery: exceptional classes must die under the transition");
    }
}

namespace detail {

// Finds a named class of the model proportional to `value`; returns the
// scalar c and the name with value = c * named.
inline std::optional<std::pair<Rational, std::string>> proportional_named(const ThreefoldModel& m,
                                                                          const CohClass& value) {
    for (const auto& [name, cls] : m.classes) {
        if (cls.degree != value.degree) continue;
        Rational c;
        bool ok = true, have = false;
        for (std::size_t i = 0; i < cls.coords.size() && ok; ++i) {
            if (cls.coords[i] == 0) {
                ok = value.coords[i] == 0;
            } else {
                Rational q = value.coords[i] / cls.coords[i];
                if (!have) {
                    c = q;
                    have = true;
                } else {
                    ok = (q == c);
                }
            }
        }
        if (ok && have && c != 0) return std::make_pair(c, name);
    }
    return std::nullopt;
}

// Solves pullback(x) = source_value for the target-side class x.
inline CohClass inverse_pullback(const CohPullback& p, const CohClass& source_value) {
    const CohClass& v = source_value;
    switch (v.degree) {
        case 0:
        case 6:
            return v;
        case 2: {
            auto x = rat_solve(p.on_h2, v.coords);
            if (!x) throw std::invalid_argument("transform: insertion has no preimage under the pullback");
            return CohClass{2, *x};
        }
        case 4: {
            auto x = rat_solve(p.on_h4, v.coords);
            if (!x) throw std::invalid_argument("transform: insertion has no preimage under the pullback");
            return CohClass{4, *x};
        }
        default:
            throw std::invalid_argument("transform: odd insertion degree");
    }
}

inline std::string render_gw_key(const std::string& model, const GWKey& k) {
    std::ostringstream os;
    os << model << ":" << render_vec(k.cls) << ":g" << k.genus << ":(";
    for (std::size_t i = 0; i < k.insertions.size(); ++i) {
        if (i) os << ",";
        os << k.insertions[i];
    }
    os << ")";
    return os.str();
}

inline std::optional<std::pair<FlopLocusPair, long long>> pair_multiple(
    const std::vector<FlopLocusPair>& pairs, const IntVec& cls) {
    for (const auto& p : pairs) {
        ThreefoldModel probe;  // reuse the componentwise divisibility test
        probe.flop_loci = {FlopLocus{p.source_cls, p.count}};
        if (auto lm = locus_multiple(probe, cls)) return std::make_pair(p, lm->second);
    }
    return std::nullopt;
}

}  // namespace detail

struct TransformResult {
    GWTable table;
    std::vector<std::string> notes;  // flagged entries that could not be transported
};

// Flop transport: entries off the flop loci are relabeled through the
// isomorphism with insertions re-expressed via the inverse pullback; entries
// on a locus multiple transport with no insertions only.
inline TransformResult flop_transform(const GWTable& t, const SurgerySetup& s,
                                      const Rational& bound) {
    if (s.kind != SurgeryKind::flop) throw std::invalid_argument("flop_transform: setup is not a flop");
    TransformResult out;
    out.table.model_name = s.target.name;
    for (const auto& [key, value] : t.entries) {
        if (dot(s.source.area, key.cls) > bound) continue;
        if (auto pm = detail::pair_multiple(s.locus_pairs, key.cls)) {
            if (!key.insertions.empty()) {
                out.notes.push_back("flop: entry on a locus multiple with insertions not transported: " +
                                    detail::render_gw_key(t.model_name, key));
                continue;
            }
            IntVec target_cls = vec_scale(pm->second, pm->first.target_cls);
            gw_table_insert(out.table, make_gw_key(target_cls, key.genus, {}), value);
            continue;
        }
        IntVec target_cls = apply_map(s.h2_map, key.cls);
        Rational scale = 1;
        std::vector<std::string> names;
        bool ok = true;
        for (const auto& name : key.insertions) {
            CohClass src_value = s.source.classes.at(name);
            CohClass tgt_value = detail::inverse_pullback(s.pullback, src_value);
            auto prop = detail::proportional_named(s.target, tgt_value);
            if (!prop) {
                out.notes.push_back("flop: no named target class matches transported insertion of " +
                                    detail::render_gw_key(t.model_name, key));
                ok = false;
                break;
            }
            scale *= prop->first;
            names.push_back(prop->second);
        }
        if (!ok) continue;
        if (scale == 0) continue;
        gw_table_insert(out.table, make_gw_key(target_cls, key.genus, std::move(names)),
                        value / scale);
    }
    return out;
}

// Pointwise pushforward of one target key: the exact finite fiber sum of
// source invariants within the area bound. B = 0 is outside the hypothesis
// and is rejected.
inline LookupResult transition_pushforward_value(const GWTable& t, const SurgerySetup& s,
                                                 const IntVec& b, int genus,
                                                 const std::vector<Insertion>& source_insertions,
                                                 const Rational& bound) {
    if (s.kind != SurgeryKind::transition)
        throw std::invalid_argument("transition pushforward: transition setups only");
    if (is_zero(b))
        throw std::invalid_argument("transition pushforward: B = 0 is outside the hypothesis");
    LookupResult out;
    bool any = false;
    for (const auto& a : fiber_classes(s.h2_map, b, s.source.area, bound, s.source.effective_cone)) {
        if (is_zero(a)) continue;
        LookupResult r = lookup_extended(s.source, t, a, genus, source_insertions);
        out.value += r.value;
        if (!r.absent) any = true;
        for (auto& k : r.absent_keys) out.absent_keys.push_back(std::move(k));
    }
    out.absent = !any;
    return out;
}

// Pushforward of a whole table through a transition: every target key is
// the fiber sum over the classes that survive the map. Keys over B = 0 are
// outside the formula's range and are skipped.
inline TransformResult transition_transform(const GWTable& t, const SurgerySetup& s,
                                            const Rational& bound) {
    if (s.kind != SurgeryKind::transition)
        throw std::invalid_argument("transition_transform: setup is not a transition");
    TransformResult out;
    out.table.model_name = s.target.name;
    for (const auto& [key, value] : t.entries) {
        (void)value;
        if (dot(s.source.area, key.cls) > bound) continue;
        IntVec b = apply_map(s.h2_map, key.cls);
        if (is_zero(b)) continue;  // locus classes die; the pushforward needs B != 0
        Rational scale = 1;
        std::vector<std::string> names;
        std::vector<Insertion> src_ins;
        bool ok = true;
        for (const auto& name : key.insertions) {
            CohClass src_value = s.source.classes.at(name);
            src_ins.push_back(Insertion{name, src_value});
            CohClass tgt_value = detail::inverse_pullback(s.pullback, src_value);
            auto prop = detail::proportional_named(s.target, tgt_value);
            if (!prop) {
                out.notes.push_back("transition: no named target class matches transported insertion of " +
                                    detail::render_gw_key(t.model_name, key));
                ok = false;
                break;
            }
            scale *= prop->first;
            names.push_back(prop->second);
        }
        if (!ok || scale == 0) continue;
        GWKey target_key = make_gw_key(b, key.genus, std::move(names));
        if (out.table.entries.count(target_key)) continue;  // fiber already summed
        Rational total = transition_pushforward_value(t, s, b, key.genus, src_ins, bound).value;
        if (total != 0) out.table.entries.emplace(std::move(target_key), total / scale);
    }
    return out;
}

struct CupCorrection {
    Rational difference;  // cup3 on the target minus cup3 of the pullbacks
    Rational expected;    // sum over loci of n * a1(Gf) a2(Gf) a3(Gf)
    bool consistent = false;
};

inline CupCorrection cup_correction(const SurgerySetup& s, const CohClass& a1, const CohClass& a2,
                                    const CohClass& a3) {
    if (s.kind != SurgeryKind::flop) throw std::invalid_argument("cup_correction: flop setups only");
    for (const CohClass* a : {&a1, &a2, &a3})
        if (a->degree != 2) throw std::invalid_argument("cup_correction: degree-2 triples only");
    Rational target_cup = cup3(s.target, a1, a2, a3);
    Rational source_cup = cup3(s.source, pullback(s.pullback, a1), pullback(s.pullback, a2),
                               pullback(s.pullback, a3));
    Rational expected = 0;
    for (const auto& p : s.locus_pairs)
        expected += Rational(p.count) * divisor_pair(a1, p.target_cls) *
                    divisor_pair(a2, p.target_cls) * divisor_pair(a3, p.target_cls);
    Rational diff = target_cup - source_cup;
    return CupCorrection{diff, expected, diff == expected};
}

struct Witness {
    std::array<std::string, 3> insertions;
    std::string lhs;
    std::string rhs;
    bool equal = false;
};

struct VerificationReport {
    bool verdict = false;
    Rational checked_order;
    int w_order = 0;
    std::string mode;  // "check" or "generate"
    std::vector<Witness> witnesses;
    std::vector<std::string> absent_flags;
    std::vector<std::string> notes;
};

struct VerifyOptions {
    Rational area_bound;
    int w_order = 0;
    std::optional<std::string> w_name;  // named class on the target model
    bool generate_target = false;       // derive the target table from the source
};

namespace detail {

inline std::vector<Insertion> named_even_classes(const ThreefoldModel& m) {
    std::vector<Insertion> out;
    for (const auto& [name, cls] : m.classes) out.push_back(Insertion{name, cls});
    return out;  // map order = sorted by name
}

inline Insertion pull_insertion(const SurgerySetup& s, const Insertion& target_ins) {
    CohClass v = pullback(s.pullback, target_ins.value);
    for (const auto& [name, cls] : s.source.classes)
        if (cls == v) return Insertion{name, v};
    return Insertion{"", v};
}

inline void collect_absent(const ThreefoldModel& m, const std::vector<GWKey>& keys,
                           std::vector<std::string>& flags) {
    for (const auto& k : keys) flags.push_back(render_gw_key(m.name, k));
}

inline void finalize_flags(std::vector<std::string>& flags) {
    std::sort(flags.begin(), flags.end());
    flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
}

inline std::string render_rat_mat(const RatMat& m) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (i) os << ";";
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) os << ",";
            os << rational_to_string(m(i, j));
        }
    }
    os << "]";
    return os.str();
}

}  // namespace detail

// Small-quantum naturality check across a flop: for every basis triple on
// the target, the target 3-point series must equal the source series of the
// pulled-back insertions after q^A -> q^{phi(A)}, up to analytic
// continuation.
inline VerificationReport verify_flop_qc(const SurgerySetup& s, const GWTable& source_table,
                                         const GWTable* target_table, const VerifyOptions& opt) {
    validate_setup(s);
    if (s.kind != SurgeryKind::flop) throw std::invalid_argument("verify_flop_qc: flop setups only");
    VerificationReport rep;
    rep.checked_order = opt.area_bound;
    rep.w_order = 0;
    rep.mode = opt.generate_target ? "generate" : "check";
    rep.notes.push_back("h4 pullback matrix: " + detail::render_rat_mat(s.pullback.on_h4));

    GWTable generated;
    if (opt.generate_target) {
        TransformResult tr = flop_transform(source_table, s, opt.area_bound);
        generated = std::move(tr.table);
        for (auto& n : tr.notes) rep.notes.push_back(std::move(n));
    } else if (!target_table) {
        throw std::invalid_argument("verify_flop_qc: check mode requires a target table");
    }
    const GWTable& tgt = opt.generate_target ? generated : *target_table;

    QuantumContext tgt_ctx{&s.target, &tgt, std::nullopt, 0, opt.area_bound};
    QuantumContext src_ctx{&s.source, &source_table, std::nullopt, 0, opt.area_bound};

    auto basis = detail::named_even_classes(s.target);
    rep.verdict = true;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j)
            for (std::size_t k = j; k < basis.size(); ++k) {
                ThreePointResult lhs = three_point(tgt_ctx, basis[i], basis[j], basis[k]);
                ThreePointResult rhs_raw =
                    three_point(src_ctx, detail::pull_insertion(s, basis[i]),
                                detail::pull_insertion(s, basis[j]), detail::pull_insertion(s, basis[k]));
                NovikovSeries rhs = nv_substitute(rhs_raw.series, s.h2_map);
                bool equal = nv_ac_equal(lhs.series, rhs);
                rep.witnesses.push_back(Witness{{basis[i].name, basis[j].name, basis[k].name},
                                                nv_render(lhs.series), nv_render(rhs), equal});
                rep.verdict = rep.verdict && equal;
                detail::collect_absent(s.target, lhs.absent_keys, rep.absent_flags);
                detail::collect_absent(s.source, rhs_raw.absent_keys, rep.absent_flags);
            }
    detail::finalize_flags(rep.absent_flags);
    return rep;
}

// Big-quantum naturality check across a transition, with deformation
// insertions up to order J. The block of flop-locus multiples is separated
// from the source series and checked to vanish term by term before the
// change of variables.
inline VerificationReport verify_transition_qc(const SurgerySetup& s, const GWTable& source_table,
                                               const GWTable* target_table,
                                               const VerifyOptions& opt) {
    validate_setup(s);
    if (s.kind != SurgeryKind::transition)
        throw std::invalid_argument("verify_transition_qc: transition setups only");
    VerificationReport rep;
    rep.checked_order = opt.area_bound;
    rep.w_order = opt.w_order;
    rep.mode = opt.generate_target ? "generate" : "check";
    rep.notes.push_back("h4 pullback (right inverse) matrix: " + detail::render_rat_mat(s.pullback.on_h4));

    // The pushforward can only be compared termwise when areas shrink along
    // the map; surface a note when the supplied functionals do not.
    {
        RatVec pushed_area = mat_apply(transpose(rat_mat(s.h2_map.matrix)), s.target.area);
        for (const auto& g : s.source.effective_cone)
            if (dot(s.source.area, g) < dot(pushed_area, g))
                rep.notes.push_back("warning: target area exceeds source area on a cone generator");
    }

    GWTable generated;
    if (opt.generate_target) {
        TransformResult tr = transition_transform(source_table, s, opt.area_bound);
        generated = std::move(tr.table);
        for (auto& n : tr.notes) rep.notes.push_back(std::move(n));
    } else if (!target_table) {
        throw std::invalid_argument("verify_transition_qc: check mode requires a target table");
    }
    const GWTable& tgt = opt.generate_target ? generated : *target_table;

    std::optional<Insertion> w_target;
    std::optional<Insertion> w_source;
    if (opt.w_name) {
        w_target = named_insertion(s.target, *opt.w_name);
        Insertion pulled = detail::pull_insertion(s, *w_target);
        w_source = pulled;
    }
    QuantumContext tgt_ctx{&s.target, &tgt, w_target, opt.w_order, opt.area_bound};
    QuantumContext src_ctx{&s.source, &source_table, w_source, opt.w_order, opt.area_bound};

    auto basis = detail::named_even_classes(s.target);
    rep.verdict = true;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j)
            for (std::size_t k = j; k < basis.size(); ++k) {
                ThreePointResult lhs = three_point(tgt_ctx, basis[i], basis[j], basis[k]);
                Insertion p1 = detail::pull_insertion(s, basis[i]);
                Insertion p2 = detail::pull_insertion(s, basis[j]);
                Insertion p3 = detail::pull_insertion(s, basis[k]);
                ThreePointResult rhs_raw = three_point(src_ctx, p1, p2, p3);

                // Separate the locus-multiple block and check it vanishes.
                bool separated_zero = true;
                NovikovSeries rhs_series = rhs_raw.series;
                for (auto it = rhs_series.poly.begin(); it != rhs_series.poly.end();) {
                    if (detail::locus_multiple(s.source, it->first)) {
                        separated_zero = false;
                        rep.notes.push_back("separated block term nonzero at q^" +
                                            detail::render_vec(it->first) + " for (" + basis[i].name +
                                            "," + basis[j].name + "," + basis[k].name + ")");
                        it = rhs_series.poly.erase(it);
                    } else {
                        ++it;
                    }
                }
                for (auto it = rhs_series.atoms.begin(); it != rhs_series.atoms.end();) {
                    if (detail::locus_multiple(s.source, it->first)) {
                        separated_zero = false;
                        rep.notes.push_back("separated block tail nonzero along " +
                                            detail::render_vec(it->first) + " for (" + basis[i].name +
                                            "," + basis[j].name + "," + basis[k].name + ")");
                        it = rhs_series.atoms.erase(it);
                    } else {
                        ++it;
                    }
                }

                NovikovSeries rhs = nv_substitute(rhs_series, s.h2_map);
                bool equal = nv_ac_equal(lhs.series, rhs) && separated_zero;
                rep.witnesses.push_back(Witness{{basis[i].name, basis[j].name, basis[k].name},
                                                nv_render(lhs.series), nv_render(rhs), equal});
                rep.verdict = rep.verdict && equal;
                detail::collect_absent(s.target, lhs.absent_keys, rep.absent_flags);
                detail::collect_absent(s.source, rhs_raw.absent_keys, rep.absent_flags);
            }
    detail::finalize_flags(rep.absent_flags);
    return rep;
}

}  // namespace gws
