#pragma once

// Finitely supported tables of absolute and log GW invariants. Two extension
// rules apply on lookup beyond the stored entries: the divisor relation
// (a degree-2 insertion comes out as the factor alpha(A) for A != 0) and the
// genus-0 multiple-cover value n/k^3 along a flop locus. Absent entries
// evaluate to 0 with a flag so silent gaps stay auditable.

#include "gwsurgery/cohomology.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gws {

struct FlopLocusData {
    IntVec cls;
    long long count = 0;
};

struct GWKey {
    IntVec cls;
    int genus = 0;
    std::vector<std::string> insertions;  // canonical: sorted names

    auto tie() const { return std::tie(cls, genus, insertions); }
    bool operator<(const GWKey& o) const { return tie() < o.tie(); }
    bool operator==(const GWKey& o) const { return tie() == o.tie(); }
};

inline GWKey make_gw_key(IntVec cls, int genus, std::vector<std::string> insertions) {
    std::sort(insertions.begin(), insertions.end());
    return GWKey{std::move(cls), genus, std::move(insertions)};
}

struct GWTable {
    std::string model_name;
    std::map<GWKey, Rational> entries;
};

inline void gw_table_insert(GWTable& t, GWKey key, const Rational& value) {
    std::sort(key.insertions.begin(), key.insertions.end());
    if (value == 0) return;
    if (!t.entries.emplace(std::move(key), value).second)
        throw std::invalid_argument("gw table: duplicate entry key");
}

inline void validate_gw_table(const ThreefoldModel& m, const GWTable& t) {
    for (const auto& [key, value] : t.entries) {
        (void)value;
        if (key.cls.size() != m.rank()) throw std::invalid_argument("gw table: class length mismatch");
        if (key.genus < 0) throw std::invalid_argument("gw table: negative genus");
        if (is_zero(key.cls) && key.genus == 0 && key.insertions.size() < 3)
            throw std::invalid_argument("gw table: A=0 genus-0 entry below the stable range");
        for (const auto& name : key.insertions)
            if (!m.classes.count(name))
                throw std::invalid_argument("gw table: unknown insertion class '" + name + "'");
        if (!std::is_sorted(key.insertions.begin(), key.insertions.end()))
            throw std::invalid_argument("gw table: insertion names not canonically sorted");
    }
}

// An insertion is a cohomology class, optionally carrying the model's name
// for it. Unnamed values still participate in the divisor reduction and in
// multilinear expansion over a named basis; they just cannot be matched
// against stored keys directly.
struct Insertion {
    std::string name;  // empty when anonymous
    CohClass value;
};

inline Insertion named_insertion(const ThreefoldModel& m, const std::string& name) {
    auto it = m.classes.find(name);
    if (it == m.classes.end())
        throw std::invalid_argument("model '" + m.name + "' has no class named '" + name + "'");
    return Insertion{name, it->second};
}

struct LookupResult {
    Rational value = 0;
    bool absent = false;
    std::vector<GWKey> absent_keys;
};

inline Rational multiple_cover_value(const FlopLocusData& d, long long k) {
    if (k <= 0) throw std::invalid_argument("multiple cover: k must be positive");
    return Rational(BigInt(d.count), BigInt(k) * k * k);
}

namespace detail {

// If cls == k * locus for some locus and integer k >= 1, returns (locus, k).
inline std::optional<std::pair<FlopLocusData, long long>> locus_multiple(const ThreefoldModel& m,
                                                                         const IntVec& cls) {
    for (const auto& locus : m.flop_loci) {
        long long k = 0;
        bool ok = true;
        for (std::size_t i = 0; i < cls.size() && ok; ++i) {
            if (locus.cls[i] == 0) {
                ok = cls[i] == 0;
            } else if (cls[i] % locus.cls[i] == 0) {
                long long q = cls[i] / locus.cls[i];
                if (k == 0)
                    k = q;
                else
                    ok = (q == k);
            } else {
                ok = false;
            }
        }
        if (ok && k >= 1) return std::make_pair(FlopLocusData{locus.cls, locus.count}, k);
    }
    return std::nullopt;
}

// Core lookup on a fixed insertion list: stored key, the fundamental-class
// rule, divisor stripping with stored keys checked at every stage, then the
// multiple-cover fallback.
inline LookupResult lookup_base(const ThreefoldModel& m, const GWTable& t, const IntVec& cls,
                                int genus, std::vector<Insertion> ins) {
    Rational factor = 1;
    const bool class_is_zero = is_zero(cls);
    while (true) {
        bool all_named = true;
        for (const auto& i : ins)
            if (i.name.empty()) {
                all_named = false;
                break;
            }
        if (all_named) {
            std::vector<std::string> names;
            names.reserve(ins.size());
            for (const auto& i : ins) names.push_back(i.name);
            auto it = t.entries.find(make_gw_key(cls, genus, names));
            if (it != t.entries.end()) return {factor * it->second, false, {}};
        }
        if (!class_is_zero) {
            // A degree-0 insertion kills the invariant for A != 0.
            for (const auto& i : ins)
                if (i.value.degree == 0) return {Rational(0), false, {}};
        }
        // Strip one degree-2 insertion (the last one keeps this deterministic).
        if (!class_is_zero) {
            std::size_t pick = ins.size();
            for (std::size_t i = ins.size(); i-- > 0;)
                if (ins[i].value.degree == 2) {
                    pick = i;
                    break;
                }
            if (pick != ins.size()) {
                factor *= divisor_pair(ins[pick].value, cls);
                ins.erase(ins.begin() + static_cast<std::ptrdiff_t>(pick));
                if (factor == 0) return {Rational(0), false, {}};
                continue;
            }
        }
        break;
    }
    if (genus == 0 && !class_is_zero && ins.empty()) {
        if (auto lm = locus_multiple(m, cls))
            return {factor * multiple_cover_value(lm->first, lm->second), false, {}};
    }
    std::vector<std::string> names;
    for (const auto& i : ins) names.push_back(i.name.empty() ? "?" : i.name);
    return {Rational(0), true, {make_gw_key(cls, genus, names)}};
}

// Expresses an anonymous class over the model's named classes of the same
// degree, when those form a basis. Returns (coefficient, name) pairs.
inline std::optional<std::vector<std::pair<Rational, std::string>>> expand_over_named(
    const ThreefoldModel& m, const CohClass& value) {
    std::vector<std::string> names;
    for (const auto& [name, cls] : m.classes)
        if (cls.degree == value.degree) names.push_back(name);
    std::size_t dim = graded_rank(m, value.degree);
    if (names.size() < dim) return std::nullopt;
    // Greedily take the first independent subset in name order.
    RatMat basis(dim, dim);
    std::vector<std::string> chosen;
    for (const auto& name : names) {
        if (chosen.size() == dim) break;
        RatMat trial(dim, chosen.size() + 1);
        for (std::size_t j = 0; j < chosen.size(); ++j)
            for (std::size_t i = 0; i < dim; ++i) trial(i, j) = m.classes.at(chosen[j]).coords[i];
        for (std::size_t i = 0; i < dim; ++i) trial(i, chosen.size()) = m.classes.at(name).coords[i];
        // Independence check via rank over Q.
        RatMat work = trial;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < work.cols && rank < work.rows; ++col) {
            std::size_t piv = rank;
            while (piv < work.rows && work(piv, col) == 0) ++piv;
            if (piv == work.rows) continue;
            for (std::size_t j = 0; j < work.cols; ++j) std::swap(work(piv, j), work(rank, j));
            for (std::size_t i = rank + 1; i < work.rows; ++i) {
                if (work(i, col) == 0) continue;
                Rational f = work(i, col) / work(rank, col);
                for (std::size_t j = 0; j < work.cols; ++j) work(i, j) -= f * work(rank, j);
            }
            ++rank;
        }
        if (rank == chosen.size() + 1) chosen.push_back(name);
    }
    if (chosen.size() != dim) return std::nullopt;
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) basis(i, j) = m.classes.at(chosen[j]).coords[i];
    auto sol = rat_solve(basis, value.coords);
    if (!sol) return std::nullopt;
    std::vector<std::pair<Rational, std::string>> out;
    for (std::size_t j = 0; j < dim; ++j)
        if ((*sol)[j] != 0) out.push_back({(*sol)[j], chosen[j]});
    return out;
}

}  // namespace detail

// Dispatch between stored entries, the divisor relation, and the genus-0
// multiple-cover rule. Anonymous insertions of degree 4 are decomposed over
// the model's named degree-4 classes so lookups stay multilinear; anonymous
// degree-2 insertions reduce through the pairing directly.
inline LookupResult lookup_extended(const ThreefoldModel& m, const GWTable& t, const IntVec& cls,
                                    int genus, const std::vector<Insertion>& insertions) {
    if (cls.size() != m.rank()) throw std::invalid_argument("lookup: class length mismatch");
    if (genus < 0) throw std::invalid_argument("lookup: negative genus");
    for (const auto& i : insertions) validate_class(m, i.value);

    // Fast path: fully named or reducible as-is.
    {
        bool needs_expansion = false;
        for (const auto& i : insertions)
            if (i.name.empty() && i.value.degree != 2 && i.value.degree != 0) needs_expansion = true;
        if (!needs_expansion) return detail::lookup_base(m, t, cls, genus, insertions);
    }

    // Multilinear expansion of anonymous degree-4/6 insertions.
    std::vector<std::vector<std::pair<Rational, Insertion>>> slots;
    for (const auto& i : insertions) {
        if (!i.name.empty() || i.value.degree == 2 || i.value.degree == 0) {
            slots.push_back({{Rational(1), i}});
            continue;
        }
        auto expansion = detail::expand_over_named(m, i.value);
        if (!expansion) {
            // No usable named basis: fall through with the raw value.
            slots.push_back({{Rational(1), i}});
            continue;
        }
        std::vector<std::pair<Rational, Insertion>> slot;
        for (const auto& [coeff, name] : *expansion)
            slot.push_back({coeff, Insertion{name, m.classes.at(name)}});
        if (slot.empty()) slot.push_back({Rational(0), Insertion{"", i.value}});
        slots.push_back(std::move(slot));
    }
    LookupResult total;
    std::vector<std::size_t> idx(slots.size(), 0);
    while (true) {
        Rational coeff = 1;
        std::vector<Insertion> choice;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            coeff *= slots[s][idx[s]].first;
            choice.push_back(slots[s][idx[s]].second);
        }
        if (coeff != 0) {
            LookupResult r = detail::lookup_base(m, t, cls, genus, std::move(choice));
            total.value += coeff * r.value;
            if (r.absent) {
                total.absent = true;
                for (auto& k : r.absent_keys) total.absent_keys.push_back(std::move(k));
            }
        }
        std::size_t s = 0;
        while (s < slots.size()) {
            if (++idx[s] < slots[s].size()) break;
            idx[s] = 0;
            ++s;
        }
        if (s == slots.size()) break;
    }
    return total;
}

// The divisor relation as a standalone operation: strips degree-2 insertions
// against stored entries only (no multiple-cover fallback). A = 0 is outside
// the relation's range.
inline LookupResult divisor_reduce(const ThreefoldModel& m, const GWTable& t, const IntVec& cls,
                                   int genus, const std::vector<Insertion>& insertions) {
    if (is_zero(cls)) throw std::invalid_argument("divisor_reduce: class must be nonzero");
    bool has_divisor = false;
    for (const auto& i : insertions)
        if (i.value.degree == 2) has_divisor = true;
    if (!has_divisor) throw std::invalid_argument("divisor_reduce: no degree-2 insertion present");
    ThreefoldModel stripped = m;
    stripped.flop_loci.clear();  // keep this a pure table reduction
    return lookup_extended(stripped, t, cls, genus, insertions);
}

// ---- log GW tables --------------------------------------------------------

// One end of a log entry: contact multiplicity with Z plus the index of the
// Z-basis class inserted at that end.
struct LogEnd {
    int multiplicity = 0;
    int z_class = 0;

    auto tie() const { return std::tie(multiplicity, z_class); }
    bool operator<(const LogEnd& o) const { return tie() < o.tie(); }
    bool operator==(const LogEnd& o) const { return tie() == o.tie(); }
};

struct LogKey {
    IntVec cls;
    int genus = 0;
    std::vector<LogEnd> ends;                // canonical: sorted
    std::vector<std::string> interior;       // canonical: sorted names

    auto tie() const { return std::tie(cls, genus, ends, interior); }
    bool operator<(const LogKey& o) const { return tie() < o.tie(); }
    bool operator==(const LogKey& o) const { return tie() == o.tie(); }
};

inline LogKey make_log_key(IntVec cls, int genus, std::vector<LogEnd> ends,
                           std::vector<std::string> interior) {
    std::sort(ends.begin(), ends.end());
    std::sort(interior.begin(), interior.end());
    return LogKey{std::move(cls), genus, std::move(ends), std::move(interior)};
}

struct LogGWTable {
    std::string pair_name;  // e.g. "(Mb, Z)"
    IntVec z_star;          // pairing Z*(.) on this side's lattice
    std::map<LogKey, Rational> entries;
};

inline void log_table_insert(LogGWTable& t, LogKey key, const Rational& value) {
    std::sort(key.ends.begin(), key.ends.end());
    std::sort(key.interior.begin(), key.interior.end());
    if (value == 0) return;
    if (!t.entries.emplace(std::move(key), value).second)
        throw std::invalid_argument("log table: duplicate entry key");
}

inline void validate_log_table(const LogGWTable& t) {
    for (const auto& [key, value] : t.entries) {
        (void)value;
        if (key.cls.size() != t.z_star.size())
            throw std::invalid_argument("log table: class length mismatch");
        long long total = 0;
        for (const auto& e : key.ends) {
            if (e.multiplicity <= 0)
                throw std::invalid_argument("log table: tangency orders must be positive");
            total += e.multiplicity;
        }
        if (total != dot(t.z_star, key.cls))
            throw std::invalid_argument("log table: tangency sum != Z*(A)");
    }
}

struct LogLookupResult {
    Rational value = 0;
    bool absent = false;
    std::vector<LogKey> absent_keys;
};

inline LogLookupResult log_lookup(const LogGWTable& t, const LogKey& key) {
    auto it = t.entries.find(key);
    if (it != t.entries.end()) return {it->second, false, {}};
    return {Rational(0), true, {key}};
}

}  // namespace gws
