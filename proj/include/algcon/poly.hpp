#ifndef ALGCON_POLY_HPP
#define ALGCON_POLY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/rational.hpp"

namespace algcon {

/// The covariance variable sigma_{v,w}. Sigma is symmetric, so the index
/// pair is stored sorted; sigma_{v,w} and sigma_{w,v} are the same variable.
struct SigmaVar {
    std::string lo, hi;

    static SigmaVar make(std::string x, std::string y) {
        if (y < x) std::swap(x, y);
        return SigmaVar{std::move(x), std::move(y)};
    }

    bool diagonal() const { return lo == hi; }

    std::string str() const { return "s[" + lo + "," + hi + "]"; }

    friend bool operator==(const SigmaVar& a, const SigmaVar& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator<(const SigmaVar& a, const SigmaVar& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    }
};

/// Multiset of variables, kept sorted.
using Monomial = std::vector<SigmaVar>;

inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// b divides a as a multiset; returns a/b on success.
inline std::optional<Monomial> monomial_div(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0;
    for (const auto& v : b) {
        while (i < a.size() && a[i] < v) out.push_back(a[i++]);
        if (i >= a.size() || !(a[i] == v)) return std::nullopt;
        ++i;
    }
    while (i < a.size()) out.push_back(a[i++]);
    return out;
}

/// Graded lexicographic term order: total degree first, then the sorted
/// variable sequences lexicographically. Fixed everywhere so that division
/// is deterministic and serializations diff cleanly.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

class NonHomogeneousError : public Error {
public:
    NonHomogeneousError(const std::string& var, const std::string& m1, const std::string& m2)
        : Error("not V-homogeneous: variable '" + var + "' occurs a different number of times in " +
                m1 + " and " + m2) {}
};

/// Exact multivariate polynomial in the sigma variables over the rationals.
/// No zero coefficients are ever stored; term order is graded lex.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rat, GradedLexLess>;

    Polynomial() = default;

    static Polynomial constant(Rat c) {
        Polynomial p;
        if (c != 0) p.terms_[{}] = std::move(c);
        return p;
    }

    static Polynomial variable(const SigmaVar& v) {
        Polynomial p;
        p.terms_[{v}] = 1;
        return p;
    }

    static Polynomial term(Monomial m, Rat c) {
        Polynomial p;
        if (c != 0) {
            std::sort(m.begin(), m.end());
            p.terms_[std::move(m)] = std::move(c);
        }
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }

    /// Total degree of the leading (graded-lex greatest) term; -1 for zero.
    int degree() const {
        if (terms_.empty()) return -1;
        return static_cast<int>(terms_.rbegin()->first.size());
    }

    const std::pair<const Monomial, Rat>& leading() const {
        if (terms_.empty()) throw Error("leading term of zero polynomial");
        return *terms_.rbegin();
    }

    std::set<std::string> variable_nodes() const {
        std::set<std::string> out;
        for (const auto& [m, c] : terms_) {
            (void)c;
            for (const auto& v : m) {
                out.insert(v.lo);
                out.insert(v.hi);
            }
        }
        return out;
    }

    void add_term(Monomial m, const Rat& c) {
        if (c == 0) return;
        std::sort(m.begin(), m.end());
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) {
            auto it = terms_.find(m);
            if (it == terms_.end()) {
                terms_.emplace(m, c);
            } else {
                it->second += c;
                if (it->second == 0) terms_.erase(it);
            }
        }
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) {
            auto it = terms_.find(m);
            if (it == terms_.end()) {
                terms_.emplace(m, -c);
            } else {
                it->second -= c;
                if (it->second == 0) terms_.erase(it);
            }
        }
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    Polynomial operator-() const {
        Polynomial p = *this;
        for (auto& [m, c] : p.terms_) {
            (void)m;
            c = -c;
        }
        return p;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m = monomial_mul(ma, mb);
                auto it = out.terms_.find(m);
                if (it == out.terms_.end()) {
                    out.terms_.emplace(std::move(m), ca * cb);
                } else {
                    it->second += ca * cb;
                    if (it->second == 0) out.terms_.erase(it);
                }
            }
        return out;
    }

    Polynomial& operator*=(const Rat& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, coef] : terms_) {
            (void)m;
            coef *= c;
        }
        return *this;
    }

    friend Polynomial operator*(Polynomial a, const Rat& c) { return a *= c; }
    friend Polynomial operator*(const Rat& c, Polynomial a) { return a *= c; }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    /// True when p equals c*q for a single rational c (c may be negative).
    bool equals_up_to_scalar(const Polynomial& o) const {
        if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
        if (terms_.size() != o.terms_.size()) return false;
        auto it = terms_.begin();
        auto jt = o.terms_.begin();
        Rat ratio = it->second / jt->second;
        for (; it != terms_.end(); ++it, ++jt) {
            if (!(it->first == jt->first)) return false;
            if (it->second != ratio * jt->second) return false;
        }
        return true;
    }

    /// Canonical sign: leading coefficient positive. Constraints represent
    /// polynomials only up to sign, so reports use this normal form.
    Polynomial canonical_sign() const {
        if (terms_.empty()) return *this;
        if (terms_.rbegin()->second > 0) return *this;
        return -*this;
    }

    /// Exact single-divisor division: returns h with *this == q*h, if such an
    /// h exists. Multivariate long division under graded lex; any step whose
    /// leading term is not divisible proves inexactness.
    std::optional<Polynomial> divide_exact(const Polynomial& q) const {
        if (q.is_zero()) throw Error("division by zero polynomial");
        Polynomial rem = *this;
        Polynomial quot;
        const auto& [qm, qc] = q.leading();
        while (!rem.is_zero()) {
            const auto& [rm, rc] = rem.leading();
            auto m = monomial_div(rm, qm);
            if (!m) return std::nullopt;
            Rat c = rc / qc;
            Polynomial t = Polynomial::term(*m, c);
            quot += t;
            rem -= t * q;
        }
        return quot;
    }

    /// Per-node occurrence counts in the variable indices, counting
    /// sigma_{vv} twice; defined only when every term agrees.
    std::map<std::string, int> homogeneity_signature() const {
        if (terms_.empty()) throw Error("homogeneity signature of zero polynomial");
        std::map<std::string, int> ref;
        bool first = true;
        std::string ref_str;
        for (const auto& [m, c] : terms_) {
            (void)c;
            std::map<std::string, int> counts;
            for (const auto& v : m) {
                counts[v.lo] += 1;
                counts[v.hi] += 1;
            }
            if (first) {
                ref = counts;
                ref_str = monomial_str(m);
                first = false;
            } else if (counts != ref) {
                // name one offending variable for the report
                std::string bad;
                for (const auto& [k, n] : ref) {
                    auto it = counts.find(k);
                    if (it == counts.end() || it->second != n) {
                        bad = k;
                        break;
                    }
                }
                if (bad.empty())
                    for (const auto& [k, n] : counts) {
                        (void)n;
                        if (!ref.count(k)) {
                            bad = k;
                            break;
                        }
                    }
                throw NonHomogeneousError(bad, ref_str, monomial_str(m));
            }
        }
        return ref;
    }

    bool is_v_homogeneous() const {
        try {
            homogeneity_signature();
            return true;
        } catch (const NonHomogeneousError&) {
            return false;
        }
    }

    /// The unique all-diagonal monomial (prod sigma_vv^k) of a V-homogeneous
    /// polynomial, if present.
    std::optional<std::pair<Monomial, Rat>> diagonal_monomial() const {
        homogeneity_signature(); // throws when not V-homogeneous
        for (const auto& [m, c] : terms_) {
            bool all_diag = true;
            for (const auto& v : m)
                if (!v.diagonal()) {
                    all_diag = false;
                    break;
                }
            if (all_diag) return std::make_pair(m, c);
        }
        return std::nullopt;
    }

    /// Applies a node renaming to every variable index.
    Polynomial renamed(const std::map<std::string, std::string>& mapping) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            Monomial nm;
            nm.reserve(m.size());
            for (const auto& v : m) {
                auto a = mapping.find(v.lo);
                auto b = mapping.find(v.hi);
                nm.push_back(SigmaVar::make(a == mapping.end() ? v.lo : a->second,
                                            b == mapping.end() ? v.hi : b->second));
            }
            out.add_term(std::move(nm), c);
        }
        return out;
    }

    static std::string monomial_str(const Monomial& m) {
        if (m.empty()) return "1";
        std::string s;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i) s += ' ';
            s += m[i].str();
        }
        return s;
    }

    /// Text form `+1 s[a,b] s[c,c] -1 s[a,c] s[b,c]`, leading term first.
    std::string to_text() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!s.empty()) s += ' ';
            const Rat& c = it->second;
            s += (c > 0 ? "+" : "") + c.get_str();
            if (!it->first.empty()) {
                s += ' ';
                s += monomial_str(it->first);
            }
        }
        return s;
    }

    static Polynomial parse(const std::string& text) {
        Polynomial p;
        std::istringstream in(text);
        std::string tok;
        std::optional<Rat> coef;
        Monomial mono;
        auto flush = [&]() {
            if (coef) p.add_term(mono, *coef);
            coef.reset();
            mono.clear();
        };
        while (in >> tok) {
            if (tok == "0" && !coef && p.is_zero()) continue;
            if (tok[0] == '+' || tok[0] == '-' || (tok[0] >= '0' && tok[0] <= '9')) {
                flush();
                std::string body = (tok[0] == '+') ? tok.substr(1) : tok;
                coef = rat_parse(body);
            } else if (tok.rfind("s[", 0) == 0 && tok.back() == ']') {
                auto comma = tok.find(',');
                if (comma == std::string::npos) throw Error("bad variable token '" + tok + "'");
                std::string x = tok.substr(2, comma - 2);
                std::string y = tok.substr(comma + 1, tok.size() - comma - 2);
                if (x.empty() || y.empty()) throw Error("bad variable token '" + tok + "'");
                if (!coef) throw Error("variable before coefficient in polynomial text");
                mono.push_back(SigmaVar::make(x, y));
            } else {
                throw Error("bad polynomial token '" + tok + "'");
            }
        }
        flush();
        return p;
    }

private:
    TermMap terms_;
};

/// Square symbolic matrix compiled from a graphical constraint: every entry
/// is either 0 or a sigma variable. Rows and columns remember which
/// (constraint node, label element) pair they came from.
struct PatternMatrix {
    using Slot = std::pair<std::string, std::string>; // (node id, label element)

    std::vector<Slot> rows, cols;
    std::vector<std::vector<std::optional<SigmaVar>>> entry;

    int dim() const { return static_cast<int>(rows.size()); }

    PatternMatrix renamed(const std::map<std::string, std::string>& mapping) const {
        PatternMatrix out = *this;
        auto ren = [&](const std::string& s) {
            auto it = mapping.find(s);
            return it == mapping.end() ? s : it->second;
        };
        for (auto& r : out.rows) r.second = ren(r.second);
        for (auto& c : out.cols) c.second = ren(c.second);
        for (auto& row : out.entry)
            for (auto& e : row)
                if (e) e = SigmaVar::make(ren(e->lo), ren(e->hi));
        return out;
    }
};

inline constexpr int kDefaultExpansionCap = 8;

/// Exact expanded symbolic determinant under the fixed row/column order.
/// Dynamic program over column subsets, level by level; refuses dimensions
/// above the cap (fingerprints cover those).
inline Polynomial det_expand(const PatternMatrix& m, int cap = kDefaultExpansionCap) {
    if (m.rows.size() != m.cols.size()) throw Error("det_expand: matrix not square");
    const int n = m.dim();
    if (n > cap) throw ExpansionCapError(n, cap);
    if (n == 0) return Polynomial::constant(1);

    // level r holds minors of rows [0..r) on each column subset of size r
    std::map<std::uint32_t, Polynomial> level;
    level[0] = Polynomial::constant(1);
    for (int r = 0; r < n; ++r) {
        std::map<std::uint32_t, Polynomial> next;
        for (const auto& [mask, minor] : level) {
            if (minor.is_zero()) continue;
            int pos = 0; // parity position of the new column within the subset
            for (int c = 0; c < n; ++c) {
                if (mask & (1u << c)) {
                    ++pos;
                    continue;
                }
                const auto& e = m.entry[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                if (!e) continue;
                // expanding along row r: sign (-1)^(r + pos-in-subset)
                Rat sign = ((r + pos) % 2 == 0) ? 1 : -1;
                Polynomial contrib = minor * Polynomial::variable(*e) * sign;
                auto key = mask | (1u << c);
                auto it = next.find(key);
                if (it == next.end())
                    next.emplace(key, std::move(contrib));
                else
                    it->second += contrib;
            }
        }
        level = std::move(next);
    }
    auto full = level.find((n >= 32) ? ~0u : ((1u << n) - 1));
    if (full == level.end()) return Polynomial();
    return full->second;
}

/// Evaluates a polynomial at exact rational sigma values.
template <typename SigmaLookup>
Rat evaluate_at(const Polynomial& p, SigmaLookup&& sigma) {
    Rat acc(0);
    for (const auto& [m, c] : p.terms()) {
        Rat t = c;
        for (const auto& v : m) t *= sigma(v.lo, v.hi);
        acc += t;
    }
    return acc;
}

/// Instantiates the pattern matrix at exact rational sigma values and
/// returns the determinant, computed without symbolic expansion.
template <typename SigmaLookup>
Rat det_at(const PatternMatrix& m, SigmaLookup&& sigma) {
    if (m.rows.size() != m.cols.size()) throw Error("det_at: matrix not square");
    const std::size_t n = m.rows.size();
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m.entry[i][j]) a[i][j] = sigma(m.entry[i][j]->lo, m.entry[i][j]->hi);
    Rat d(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a[piv][k] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != k) {
            std::swap(a[k], a[piv]);
            d = -d;
        }
        d *= a[k][k];
        Rat inv_piv = 1 / a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == 0) continue;
            Rat f = a[i][k] * inv_piv;
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return d;
}

} // namespace algcon

#endif // ALGCON_POLY_HPP
