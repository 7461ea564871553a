#pragma once

// Formal sums over Novikov variables q^A with exact rational coefficients.
// Two kinds of terms are supported: a finitely supported polynomial part and
// "geometric atoms" c * q^G/(1 - q^G), the one transcendental closed form
// the surgery identities need. Equality is syntactic on normal forms after
// the reciprocal-exponent rewrite
//     c * q^G/(1-q^G)  =  -c  +  (-c) * q^{-G}/(1-q^{-G}),
// which is how two series that are expansions of the same rational function
// at opposite ends get identified.

#include "gwsurgery/lattice.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace gws {

// Truncation boundary: the series is complete on {A : area(A) <= bound}.
struct Truncation {
    RatVec area;
    Rational bound;
};

struct NovikovSeries {
    std::size_t rank = 0;
    std::map<IntVec, Rational> poly;   // exponent -> coefficient, no zeros
    std::map<IntVec, Rational> atoms;  // G -> c meaning c * q^G/(1-q^G)
    std::optional<Truncation> trunc;
};

inline NovikovSeries nv_zero(std::size_t rank) { return NovikovSeries{rank, {}, {}, std::nullopt}; }

inline NovikovSeries nv_constant(std::size_t rank, const Rational& c) {
    NovikovSeries s = nv_zero(rank);
    if (c != 0) s.poly[IntVec(rank, 0)] = c;
    return s;
}

inline NovikovSeries nv_monomial(const Rational& c, const IntVec& expo) {
    NovikovSeries s = nv_zero(expo.size());
    if (c != 0) s.poly[expo] = c;
    return s;
}

inline NovikovSeries nv_atom(const Rational& c, const IntVec& cls) {
    if (is_zero(cls)) throw std::invalid_argument("novikov: atom with zero class");
    NovikovSeries s = nv_zero(cls.size());
    if (c != 0) s.atoms[cls] = c;
    return s;
}

namespace detail {
inline void add_into(std::map<IntVec, Rational>& m, const IntVec& k, const Rational& c) {
    if (c == 0) return;
    auto it = m.find(k);
    if (it == m.end()) {
        m.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0) m.erase(it);
    }
}

inline std::optional<Truncation> merge_trunc(const NovikovSeries& f, const NovikovSeries& g) {
    if (f.trunc && g.trunc) {
        Truncation t = *f.trunc;  // prefer the left operand's area functional
        if (g.trunc->bound < t.bound) t.bound = g.trunc->bound;
        return t;
    }
    if (f.trunc) return f.trunc;
    return g.trunc;
}
}  // namespace detail

inline NovikovSeries nv_add(const NovikovSeries& f, const NovikovSeries& g) {
    if (f.rank != g.rank) throw std::invalid_argument("novikov: lattice rank mismatch");
    NovikovSeries out = f;
    out.trunc = detail::merge_trunc(f, g);
    for (const auto& [k, c] : g.poly) detail::add_into(out.poly, k, c);
    for (const auto& [k, c] : g.atoms) detail::add_into(out.atoms, k, c);
    return out;
}

inline NovikovSeries nv_scale(const Rational& s, const NovikovSeries& f) {
    NovikovSeries out = nv_zero(f.rank);
    out.trunc = f.trunc;
    if (s == 0) return out;
    for (const auto& [k, c] : f.poly) out.poly[k] = s * c;
    for (const auto& [k, c] : f.atoms) out.atoms[k] = s * c;
    return out;
}

inline NovikovSeries nv_neg(const NovikovSeries& f) { return nv_scale(Rational(-1), f); }

inline NovikovSeries nv_sub(const NovikovSeries& f, const NovikovSeries& g) {
    return nv_add(f, nv_neg(g));
}

// Expands every atom into the polynomial part, within the truncation region.
// Atoms must point into the positive-area half space.
inline NovikovSeries nv_expand(const NovikovSeries& f, std::optional<Truncation> use = std::nullopt) {
    const std::optional<Truncation>& t = use ? use : f.trunc;
    if (!t) throw std::invalid_argument("novikov: expansion requires a truncation");
    NovikovSeries out = nv_zero(f.rank);
    out.trunc = t;
    for (const auto& [k, c] : f.poly)
        if (dot(t->area, k) <= t->bound) detail::add_into(out.poly, k, c);
    for (const auto& [g, c] : f.atoms) {
        Rational step = dot(t->area, g);
        if (step <= 0)
            throw std::invalid_argument("novikov: cannot expand an atom of non-positive area");
        IntVec expo = g;
        for (Rational a = step; a <= t->bound; a += step) {
            detail::add_into(out.poly, expo, c);
            expo = vec_add(expo, g);
        }
    }
    return out;
}

// Product. Polynomial x polynomial is exact; any atom involved requires a
// truncation so the atom can be expanded first. Atom x atom has no closed
// form in this class and is rejected when no truncation is available.
inline NovikovSeries nv_mul(const NovikovSeries& f, const NovikovSeries& g) {
    if (f.rank != g.rank) throw std::invalid_argument("novikov: lattice rank mismatch");
    std::optional<Truncation> t = detail::merge_trunc(f, g);
    if ((!f.atoms.empty() || !g.atoms.empty()) && !t)
        throw std::invalid_argument("novikov: product with atoms requires a truncation");
    if (!f.atoms.empty() && !g.atoms.empty() && !(f.trunc && g.trunc))
        throw std::invalid_argument("novikov: atom * atom requires both operands truncated");
    NovikovSeries a = f.atoms.empty() ? f : nv_expand(f, t);
    NovikovSeries b = g.atoms.empty() ? g : nv_expand(g, t);
    NovikovSeries out = nv_zero(f.rank);
    out.trunc = t;
    for (const auto& [ka, ca] : a.poly)
        for (const auto& [kb, cb] : b.poly) {
            IntVec k = vec_add(ka, kb);
            if (t && dot(t->area, k) > t->bound) continue;
            detail::add_into(out.poly, k, ca * cb);
        }
    return out;
}

// Change of formal variable q^A -> q^{m(A)} on every exponent. Exponents may
// collide under non-injective maps; coefficients then add up (this is the
// fiber collapse of a pushforward). Truncations transport only through isos.
inline NovikovSeries nv_substitute(const NovikovSeries& f, const LatticeMap& m) {
    if (f.rank != static_cast<std::size_t>(m.source.rank))
        throw std::invalid_argument("novikov: substitution source rank mismatch");
    NovikovSeries out = nv_zero(static_cast<std::size_t>(m.target.rank));
    for (const auto& [k, c] : f.poly) detail::add_into(out.poly, mat_apply(m.matrix, k), c);
    for (const auto& [g, c] : f.atoms) {
        IntVec img = mat_apply(m.matrix, g);
        if (is_zero(img))
            throw std::invalid_argument("novikov: substitution sends an atom class to zero");
        detail::add_into(out.atoms, img, c);
    }
    if (f.trunc && m.kind == MapKind::iso) {
        auto inv = rat_inverse(rat_mat(m.matrix));
        out.trunc = Truncation{mat_apply(transpose(*inv), f.trunc->area), f.trunc->bound};
    }
    return out;
}

struct ClosedFormResult {
    NovikovSeries series;
    bool recognized = false;
};

// Recognizes an arithmetic progression of constant coefficients along the
// multiples of cls and replaces it by a geometric atom. Requires a truncated
// series; non-constant coefficients are reported, not an error.
inline ClosedFormResult nv_closed_form(const NovikovSeries& f, const IntVec& cls) {
    if (!f.trunc) throw std::invalid_argument("novikov: closed form requires a truncated series");
    if (cls.size() != f.rank) throw std::invalid_argument("novikov: class length mismatch");
    if (is_zero(cls)) throw std::invalid_argument("novikov: closed form along the zero class");
    Rational step = dot(f.trunc->area, cls);
    if (step <= 0) return {f, false};
    long long max_k = 0;
    {
        Rational a = step;
        while (a <= f.trunc->bound) {
            ++max_k;
            a += step;
        }
    }
    if (max_k < 1) return {f, false};
    Rational c;
    IntVec expo = cls;
    for (long long k = 1; k <= max_k; ++k) {
        auto it = f.poly.find(expo);
        Rational ck = (it == f.poly.end()) ? Rational(0) : it->second;
        if (k == 1)
            c = ck;
        else if (ck != c)
            return {f, false};
        expo = vec_add(expo, cls);
    }
    if (c == 0) return {f, false};
    NovikovSeries out = f;
    expo = cls;
    for (long long k = 1; k <= max_k; ++k) {
        out.poly.erase(expo);
        expo = vec_add(expo, cls);
    }
    detail::add_into(out.atoms, cls, c);
    return {std::move(out), true};
}

namespace detail {
// Sign of the orientation functional on an exponent class: the truncation
// area when available, else the sign of the first nonzero coordinate.
inline int orient_sign(const std::optional<Truncation>& t, const IntVec& v) {
    if (t) {
        Rational a = dot(t->area, v);
        if (a > 0) return 1;
        if (a < 0) return -1;
    }
    for (long long x : v) {
        if (x > 0) return 1;
        if (x < 0) return -1;
    }
    return 0;
}

// Rewrites every atom pointing into the negative half space:
// atom(c, G) -> -c + atom(-c, -G).
inline NovikovSeries ac_canonicalize(const NovikovSeries& f, const std::optional<Truncation>& t) {
    NovikovSeries out = nv_zero(f.rank);
    out.trunc = f.trunc;
    out.poly = f.poly;
    for (const auto& [g, c] : f.atoms) {
        if (orient_sign(t, g) < 0) {
            add_into(out.poly, IntVec(f.rank, 0), -c);
            add_into(out.atoms, vec_neg(g), -c);
        } else {
            add_into(out.atoms, g, c);
        }
    }
    return out;
}
}  // namespace detail

// Equality up to analytic continuation. After canonicalizing atoms, equal
// atom parts are compared exactly on polynomials; differing atom parts fall
// back to termwise comparison of the truncated expansions when a truncation
// is available.
inline bool nv_ac_equal(const NovikovSeries& f, const NovikovSeries& g) {
    if (f.rank != g.rank) throw std::invalid_argument("novikov: lattice rank mismatch");
    std::optional<Truncation> t = detail::merge_trunc(f, g);
    NovikovSeries cf = detail::ac_canonicalize(f, t);
    NovikovSeries cg = detail::ac_canonicalize(g, t);
    if (cf.atoms == cg.atoms) return cf.poly == cg.poly;
    if (!t) return false;
    for (const auto& s : {&cf, &cg})
        for (const auto& [cls, c] : s->atoms) {
            (void)c;
            if (dot(t->area, cls) <= 0) return false;  // not expandable
        }
    return nv_expand(cf, t).poly == nv_expand(cg, t).poly;
}

// ---- canonical text form ------------------------------------------------
// c*q^[a,b,...] for monomials, c*G([a,b,...]) for atoms, plain rationals for
// constants; terms joined by " + " / " - " with magnitudes, poly before
// atoms, exponents in lexicographic order.

namespace detail {
inline void render_term(std::string& out, bool& first, const Rational& c, const std::string& body) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
        out += (c < 0) ? "-" : "";
        first = false;
    } else {
        out += (c < 0) ? " - " : " + ";
    }
    if (body.empty()) {
        out += rational_to_string(mag);
    } else {
        if (mag != 1) out += rational_to_string(mag) + "*";
        out += body;
    }
}
}  // namespace detail

inline std::string nv_render(const NovikovSeries& f) {
    if (f.poly.empty() && f.atoms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : f.poly) {
        std::string body = is_zero(k) ? "" : "q^" + detail::render_vec(k);
        detail::render_term(out, first, c, body);
    }
    for (const auto& [g, c] : f.atoms) detail::render_term(out, first, c, "G(" + detail::render_vec(g) + ")");
    return out;
}

// Parser for the same grammar; used by test fixtures and the CLI.
inline NovikovSeries nv_parse(const std::string& text, std::size_t rank) {
    NovikovSeries out = nv_zero(rank);
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i; };
    auto parse_int_vec = [&]() -> IntVec {
        skip_ws();
        if (i >= text.size() || text[i] != '[') throw std::invalid_argument("series: expected '['");
        ++i;
        IntVec v;
        skip_ws();
        if (i < text.size() && text[i] == ']') {
            ++i;
        } else {
            while (true) {
                skip_ws();
                std::size_t j = i;
                if (j < text.size() && (text[j] == '-' || text[j] == '+')) ++j;
                std::size_t k = j;
                while (k < text.size() && isdigit(static_cast<unsigned char>(text[k]))) ++k;
                if (k == j) throw std::invalid_argument("series: expected integer in exponent");
                v.push_back(std::stoll(text.substr(i, k - i)));
                i = k;
                skip_ws();
                if (i < text.size() && text[i] == ',') {
                    ++i;
                    continue;
                }
                if (i < text.size() && text[i] == ']') {
                    ++i;
                    break;
                }
                throw std::invalid_argument("series: expected ',' or ']' in exponent");
            }
        }
        if (v.size() != rank) throw std::invalid_argument("series: exponent length != rank");
        return v;
    };

    skip_ws();
    if (i >= text.size()) throw std::invalid_argument("series: empty text");
    bool first = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) break;
        int sign = 1;
        if (!first || text[i] == '+' || text[i] == '-') {
            if (i >= text.size() || (text[i] != '+' && text[i] != '-'))
                throw std::invalid_argument("series: expected '+' or '-'");
            sign = (text[i] == '-') ? -1 : 1;
            ++i;
            skip_ws();
        }
        first = false;
        // optional coefficient
        Rational coeff = 1;
        bool have_coeff = false;
        std::size_t j = i;
        while (j < text.size() &&
               (isdigit(static_cast<unsigned char>(text[j])) || text[j] == '/')) ++j;
        if (j > i) {
            coeff = parse_rational(text.substr(i, j - i));
            have_coeff = true;
            i = j;
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip_ws();
            }
        }
        coeff *= sign;
        if (i < text.size() && text[i] == 'q') {
            ++i;
            if (i >= text.size() || text[i] != '^') throw std::invalid_argument("series: expected '^'");
            ++i;
            detail::add_into(out.poly, parse_int_vec(), coeff);
        } else if (i < text.size() && text[i] == 'G') {
            ++i;
            skip_ws();
            if (i >= text.size() || text[i] != '(') throw std::invalid_argument("series: expected '('");
            ++i;
            IntVec g = parse_int_vec();
            skip_ws();
            if (i >= text.size() || text[i] != ')') throw std::invalid_argument("series: expected ')'");
            ++i;
            if (is_zero(g)) throw std::invalid_argument("series: atom with zero class");
            detail::add_into(out.atoms, g, coeff);
        } else if (have_coeff) {
            detail::add_into(out.poly, IntVec(rank, 0), coeff);
        } else {
            throw std::invalid_argument("series: expected a term");
        }
    }
    return out;
}

}  // namespace gws
