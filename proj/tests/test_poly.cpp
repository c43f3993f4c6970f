#include <catch_amalgamated.hpp>

#include "algcon/constraint.hpp"
#include "algcon/fingerprint.hpp"
#include "algcon/poly.hpp"
#include "oracles.hpp"

using namespace algcon;

namespace {

GraphicalConstraint pcor_constraint() {
    return GraphicalConstraint({{"t1", {"a", "c"}}}, {{"t2", {"b", "c"}}}, {{"t1", "t2"}});
}

GraphicalConstraint bfa_constraint() {
    return GraphicalConstraint({{"v0", {"c"}}, {"v1", {"a", "b"}}},
                               {{"v3", {"b", "d"}}, {"v4", {"a"}}},
                               {{"v0", "v3"}, {"v1", "v3"}, {"v1", "v4"}});
}

Polynomial sigma(const std::string& x, const std::string& y) {
    return Polynomial::variable(SigmaVar::make(x, y));
}

} // namespace

TEST_CASE("det_expand: partial-correlation determinant") {
    Polynomial det = det_expand(pcor_constraint().build_matrix());
    Polynomial expected = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    REQUIRE(det.equals_up_to_scalar(expected));
    // the sign induced by the fixed row/col order is also pinned
    REQUIRE(det.canonical_sign() == expected.canonical_sign());
}

TEST_CASE("det_expand: 1x1 and degree-3 examples") {
    GraphicalConstraint one({{"t1", {"a"}}}, {{"t2", {"b"}}}, {{"t1", "t2"}});
    REQUIRE(det_expand(one.build_matrix()) == sigma("a", "b"));

    Polynomial det = det_expand(bfa_constraint().build_matrix());
    REQUIRE(det.degree() == 3);
    REQUIRE(det.term_count() == 4);
    Polynomial expected = sigma("a", "b") * sigma("a", "d") * sigma("b", "c") -
                          sigma("a", "b") * sigma("a", "b") * sigma("c", "d") -
                          sigma("a", "a") * sigma("b", "c") * sigma("b", "d") +
                          sigma("a", "a") * sigma("b", "b") * sigma("c", "d");
    REQUIRE(det.equals_up_to_scalar(expected));
}

TEST_CASE("det_expand refuses dimensions above the cap") {
    std::vector<std::string> vars;
    for (int i = 0; i < 9; ++i) vars.push_back(std::string(1, static_cast<char>('a' + i)));
    GraphicalConstraint big({{"m1", vars}}, {{"m2", vars}}, {{"m1", "m2"}});
    REQUIRE_THROWS_AS(det_expand(big.build_matrix()), ExpansionCapError);
    REQUIRE_NOTHROW(det_expand(big.build_matrix(), 9));
}

TEST_CASE("det_expand equals cofactor oracle on random 4x4 patterns", "[oracle]") {
    SplitMix64 rng(2024);
    std::vector<std::string> vars{"a", "b", "c", "d"};
    for (int trial = 0; trial < 100; ++trial) {
        PatternMatrix m;
        for (int i = 0; i < 4; ++i) {
            m.rows.push_back({"r", vars[static_cast<std::size_t>(i)]});
            m.cols.push_back({"c", vars[rng.next_below(4)]});
        }
        m.entry.assign(4, std::vector<std::optional<SigmaVar>>(4));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (rng.next_below(100) < 65)
                    m.entry[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        SigmaVar::make(m.rows[static_cast<std::size_t>(i)].second,
                                       m.cols[static_cast<std::size_t>(j)].second);
        REQUIRE(det_expand(m) == oracles::cofactor_det(m));
    }
}

TEST_CASE("divide_exact: worked examples") {
    Polynomial f = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    auto self = f.divide_exact(f);
    REQUIRE(self);
    REQUIRE(*self == Polynomial::constant(1));

    Polynomial saa = sigma("a", "a");
    auto quot = (saa * f).divide_exact(saa);
    REQUIRE(quot);
    REQUIRE(*quot == f);

    REQUIRE_FALSE(f.divide_exact(saa).has_value());
    REQUIRE_THROWS_AS(f.divide_exact(Polynomial()), Error);
}

TEST_CASE("divide_exact recovers factors of random products", "[property]") {
    SplitMix64 rng(7);
    std::vector<std::string> vars{"a", "b", "c"};
    int done = 0;
    while (done < 200) {
        Polynomial p = oracles::random_polynomial(rng, vars, 4, 3);
        Polynomial q = oracles::random_polynomial(rng, vars, 4, 3);
        if (p.is_zero() || q.is_zero()) continue;
        auto h = (p * q).divide_exact(q);
        REQUIRE(h);
        REQUIRE(*h == p);
        ++done;
    }
}

TEST_CASE("homogeneity signature") {
    Polynomial f = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    auto sig = f.homogeneity_signature();
    REQUIRE(sig == std::map<std::string, int>{{"a", 1}, {"b", 1}, {"c", 2}});

    Polynomial bad = sigma("a", "b") + sigma("c", "c");
    REQUIRE_THROWS_AS(bad.homogeneity_signature(), NonHomogeneousError);

    Polynomial det = det_expand(bfa_constraint().build_matrix());
    REQUIRE(det.homogeneity_signature() ==
            std::map<std::string, int>{{"a", 2}, {"b", 2}, {"c", 1}, {"d", 1}});
}

TEST_CASE("homogeneity signature equals label slot counts", "[property]") {
    // row slots + column slots per variable, by the matrix structure
    for (const auto& gc : {pcor_constraint(), bfa_constraint()}) {
        Polynomial det = det_expand(gc.build_matrix());
        std::map<std::string, int> slots;
        for (const auto& n : gc.part_a())
            for (const auto& v : n.label) ++slots[v];
        for (const auto& n : gc.part_b())
            for (const auto& v : n.label) ++slots[v];
        REQUIRE(det.homogeneity_signature() == slots);
    }
}

TEST_CASE("diagonal monomial") {
    Polynomial f = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    REQUIRE_FALSE(f.diagonal_monomial().has_value());

    Polynomial minor = sigma("a", "a") * sigma("b", "b") - sigma("a", "b") * sigma("a", "b");
    auto diag = minor.diagonal_monomial();
    REQUIRE(diag);
    REQUIRE(diag->second == 1);
    REQUIRE(Polynomial::monomial_str(diag->first) == "s[a,a] s[b,b]");

    Polynomial det = det_expand(bfa_constraint().build_matrix());
    REQUIRE_FALSE(det.diagonal_monomial().has_value());
}

TEST_CASE("text serialization round trip") {
    Polynomial f = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    REQUIRE(Polynomial::parse(f.to_text()) == f);
    REQUIRE(Polynomial::parse("+1 s[a,b] s[c,c] -1 s[a,c] s[b,c]").equals_up_to_scalar(f));
    REQUIRE(Polynomial::parse("0").is_zero());
    REQUIRE(Polynomial().to_text() == "0");
    // rational coefficients
    Polynomial g = Polynomial::term({SigmaVar::make("a", "a")}, rat_parse("-3/2"));
    REQUIRE(Polynomial::parse(g.to_text()) == g);

    SplitMix64 rng(11);
    for (int t = 0; t < 50; ++t) {
        Polynomial p = oracles::random_polynomial(rng, {"a", "b", "x"}, 6, 4);
        REQUIRE(Polynomial::parse(p.to_text()) == p);
    }
}

TEST_CASE("fingerprint: matrix path equals expanded path") {
    for (const auto& gc : {pcor_constraint(), bfa_constraint()}) {
        PatternMatrix m = gc.build_matrix();
        Fingerprint fm = fingerprint(m, 42);
        Fingerprint fp = fingerprint(det_expand(m), 42);
        REQUIRE(fm.values == fp.values);
    }
}

TEST_CASE("fingerprint: scalar equivalence and sign flips") {
    Polynomial f = sigma("a", "b") * sigma("c", "c") - sigma("a", "c") * sigma("b", "c");
    Polynomial f7 = f * Rat(7);
    REQUIRE(equal_up_to_scalar(fingerprint(f, 1), fingerprint(f7, 1)));
    REQUIRE_FALSE(equal_up_to_sign(fingerprint(f, 1), fingerprint(f7, 1)));
    REQUIRE(equal_up_to_sign(fingerprint(f, 1), fingerprint(-f, 1)));

    Polynomial flipped = sigma("a", "b") * sigma("c", "c") + sigma("a", "c") * sigma("b", "c");
    REQUIRE_FALSE(equal_up_to_scalar(fingerprint(f, 1), fingerprint(flipped, 1)));

    REQUIRE(normalized_key(fingerprint(f, 1)) == normalized_key(fingerprint(f7, 1)));
    REQUIRE(normalized_key(fingerprint(f, 1)) != normalized_key(fingerprint(flipped, 1)));

    REQUIRE_THROWS_AS(equal_up_to_scalar(fingerprint(f, 1), fingerprint(f, 2)), Error);
}

TEST_CASE("fingerprint invariants") {
    Fingerprint z = fingerprint(Polynomial(), 3);
    REQUIRE(z.is_zero());
    REQUIRE(z.values.size() == kFingerprintPoints);
    REQUIRE(z.prime > (1ULL << 31));
    REQUIRE_THROWS_AS(fingerprint(Polynomial(), 3, 4), Error); // needs >= 8 points
}

TEST_CASE("evaluate_at agrees with det_at") {
    PatternMatrix m = bfa_constraint().build_matrix();
    Polynomial det = det_expand(m);
    SplitMix64 rng(5);
    auto lookup = [&](const std::string& x, const std::string& y) -> Rat {
        SplitMix64 h(fnv1a64(x) ^ fnv1a64(y) ^ 77);
        Rat r(static_cast<long>(h.next_in(-9, 9)), 4);
        r.canonicalize();
        return r;
    };
    (void)rng;
    REQUIRE(evaluate_at(det, lookup) == det_at(m, lookup));
}
