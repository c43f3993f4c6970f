#include <catch_amalgamated.hpp>

#include "algcon/construct.hpp"
#include "algcon/oracle.hpp"
#include "oracles.hpp"

using namespace algcon;

namespace {

MixedGraph cycle_bow_graph() {
    return MixedGraph::parse("nodes a b c d\ndir a b\ndir d a\ndir a c\ndir c a\nbi a b\n");
}

MixedGraph bfa_graph() {
    return MixedGraph::parse("nodes a b c d\ndir a b\ndir b d\nbi a c\nbi a d\nbi b c\n");
}

IdentifyingFamily cycle_bow_family() {
    IdentifyingFamily fam;
    fam.sets = {{"a", {"c", "d"}}, {"b", {"d"}}, {"c", {"d"}}, {"d", {}}};
    fam.order = {"d", "c", "b", "a"};
    return fam;
}

IdentifyingFamily pa_family(const MixedGraph& g, std::vector<std::string> order) {
    IdentifyingFamily fam;
    for (const auto& v : g.nodes()) {
        auto pa = g.parents(v);
        std::sort(pa.begin(), pa.end());
        fam.sets[v] = pa;
    }
    fam.order = std::move(order);
    return fam;
}

} // namespace

TEST_CASE("sample_parameters: support patterns") {
    MixedGraph empty = MixedGraph::parse("nodes a b c");
    auto pe = sample_parameters(empty, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            REQUIRE(pe.lambda(i, j) == 0);
            if (i != j) REQUIRE(pe.omega(i, j) == 0);
        }
    CovarianceMatrix se = covariance(pe);
    for (const auto& v : empty.nodes())
        for (const auto& w : empty.nodes())
            if (v != w) REQUIRE(se.at(v, w) == 0);

    MixedGraph g2 = bfa_graph();
    auto p2 = sample_parameters(g2, 4);
    // omega nonzero exactly on diag and {ac, ad, bc}
    auto idx = [&](const std::string& s) { return static_cast<std::size_t>(g2.index_of(s)); };
    std::set<std::pair<std::size_t, std::size_t>> expect = {
        {idx("a"), idx("c")}, {idx("a"), idx("d")}, {idx("b"), idx("c")}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            bool should = expect.count({i, j}) > 0;
            REQUIRE((p2.omega(i, j) != 0) == should);
        }
    for (std::size_t i = 0; i < 4; ++i) REQUIRE(p2.omega(i, i) > 0);
    REQUIRE(is_positive_definite(p2.omega));
}

TEST_CASE("sample_parameters: cyclic graphs resample to invertibility") {
    MixedGraph g1 = cycle_bow_graph();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto p = sample_parameters(g1, seed);
        RatMatrix im = RatMatrix::identity(4) - p.lambda;
        REQUIRE(det(im) != 0);
    }
}

TEST_CASE("covariance: hand-checked 2x2") {
    MixedGraph g = MixedGraph::parse("nodes a b\ndir a b\n");
    Parameters p;
    p.names = {"a", "b"};
    p.lambda = RatMatrix(2, 2);
    p.lambda(0, 1) = Rat(3, 4); // a -> b
    p.omega = RatMatrix::identity(2);
    CovarianceMatrix sigma = covariance(p);
    REQUIRE(sigma.at("a", "a") == 1);
    REQUIRE(sigma.at("a", "b") == Rat(3, 4));
    REQUIRE(sigma.at("b", "b") == 1 + Rat(9, 16));
}

TEST_CASE("covariance is symmetric positive definite", "[property]") {
    for (const auto& g : {cycle_bow_graph(), bfa_graph()}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            CovarianceMatrix sigma = covariance(sample_parameters(g, seed));
            REQUIRE(sigma.matrix().is_symmetric());
            REQUIRE(sigma.is_positive_definite());
        }
    }
}

TEST_CASE("identification round trip recovers lambda exactly", "[property]") {
    MixedGraph g2 = bfa_graph();
    auto fam2 = pa_family(g2, {"a", "b", "c", "d"});
    MixedGraph g1 = cycle_bow_graph();
    auto fam1 = cycle_bow_family();
    for (std::uint64_t seed = 100; seed < 125; ++seed) {
        auto p2 = sample_parameters(g2, seed);
        REQUIRE(identify_lambda(g2, fam2, covariance(p2)) == p2.lambda);
        auto p1 = sample_parameters(g1, seed); // exercises the htr-corrected rows
        REQUIRE(identify_lambda(g1, fam1, covariance(p1)) == p1.lambda);
    }
}

TEST_CASE("identify at the identity covariance gives zero lambda") {
    MixedGraph g2 = bfa_graph();
    auto fam2 = pa_family(g2, {"a", "b", "c", "d"});
    CovarianceMatrix id({"a", "b", "c", "d"}, RatMatrix::identity(4));
    RatMatrix lam = identify_lambda(g2, fam2, id);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) REQUIRE(lam(i, j) == 0);
}

TEST_CASE("identification undefined signals the offending node") {
    // a -> b with Y_b = {c}: A^(b) = [sigma_ca]; make it zero
    MixedGraph g = MixedGraph::parse("nodes a b c\ndir a b\ndir c a\n");
    IdentifyingFamily fam;
    fam.sets = {{"a", {"c"}}, {"b", {"c"}}, {"c", {}}};
    fam.order = {"c", "a", "b"};
    REQUIRE(validate_family(g, fam));
    RatMatrix m = RatMatrix::identity(3); // sigma_ca = 0
    CovarianceMatrix sigma({"a", "b", "c"}, m);
    try {
        identify_lambda(g, fam, sigma);
        FAIL("expected identification to be undefined");
    } catch (const IdentificationUndefined& e) {
        REQUIRE((e.node() == "a" || e.node() == "b"));
    }
}

TEST_CASE("rational constraint value") {
    MixedGraph g2 = bfa_graph();
    auto fam2 = pa_family(g2, {"a", "b", "c", "d"});
    // on-model: exactly zero
    for (std::uint64_t seed = 7; seed < 12; ++seed) {
        CovarianceMatrix sigma = covariance(sample_parameters(g2, seed));
        REQUIRE(rational_constraint_value(g2, fam2, sigma, {"c", "d"}) == 0);
    }
    // off-model: generically nonzero
    int nonzero = 0;
    for (std::uint64_t seed = 50; seed < 55; ++seed) {
        CovarianceMatrix sigma = random_pd_covariance(g2.nodes(), seed);
        if (rational_constraint_value(g2, fam2, sigma, {"c", "d"}) != 0) ++nonzero;
    }
    REQUIRE(nonzero == 5);
    // empty graph: the value is just sigma_vw
    MixedGraph empty = MixedGraph::parse("nodes a b c");
    auto fame = find_identifying_family(empty);
    CovarianceMatrix sigma = random_pd_covariance(empty.nodes(), 3);
    REQUIRE(rational_constraint_value(empty, *fame, sigma, {"a", "b"}) == sigma.at("a", "b"));
}

TEST_CASE("full gram identity reproduces omega", "[property]") {
    // [(I - Lambda)^T Sigma (I - Lambda)] == Omega entrywise on model samples
    for (const auto& g : {bfa_graph(), cycle_bow_graph()}) {
        auto fam = (g.bidirected().size() == 3) ? pa_family(g, {"a", "b", "c", "d"})
                                                : cycle_bow_family();
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto p = sample_parameters(g, seed);
            CovarianceMatrix sigma = covariance(p);
            RatMatrix lam = identify_lambda(g, fam, sigma);
            REQUIRE(lam == p.lambda);
            const std::size_t n = static_cast<std::size_t>(g.size());
            RatMatrix im = RatMatrix::identity(n) - lam;
            RatMatrix sig(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    sig(i, j) = sigma.at(g.name(static_cast<int>(i)), g.name(static_cast<int>(j)));
            REQUIRE(im.transposed() * sig * im == p.omega);
        }
    }
}

TEST_CASE("off-model covariances are positive definite") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CovarianceMatrix sigma = random_pd_covariance({"a", "b", "c", "d"}, seed);
        REQUIRE(sigma.is_positive_definite());
    }
}

TEST_CASE("model codimension") {
    // empty 2-node graph: 3 observed entries, 2 parameters
    MixedGraph e2 = MixedGraph::parse("nodes a b");
    REQUIRE(model_codimension(e2, 1) == 1);
    // single directed edge: saturated
    MixedGraph d2 = MixedGraph::parse("nodes a b\ndir a b");
    REQUIRE(model_codimension(d2, 1) == 0);
    // the bow-free acyclic example imposes exactly one constraint
    REQUIRE(model_codimension(bfa_graph(), 1) == 1);
    REQUIRE(model_codimension(cycle_bow_graph(), 1) == 1);
}

TEST_CASE("battery reproducibility is scheduling independent") {
    MixedGraph g2 = bfa_graph();
    auto fam2 = pa_family(g2, {"a", "b", "c", "d"});
    auto d = derive_constraint(g2, fam2, {"c", "d"});
    auto r1 = vanishing_battery(d.gc, g2, 10, 77);
    auto r2 = vanishing_battery(d.gc, g2, 10, 77);
    REQUIRE(r1.model_pass == r2.model_pass);
    REQUIRE(r1.offmodel_reject == r2.offmodel_reject);
}
