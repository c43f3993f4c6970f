#ifndef ALGCON_STUDY_HPP
#define ALGCON_STUDY_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "algcon/classify.hpp"
#include "algcon/construct.hpp"
#include "algcon/fingerprint.hpp"
#include "algcon/graph.hpp"
#include "algcon/htc.hpp"
#include "algcon/json_io.hpp"
#include "algcon/oracle.hpp"
#include "algcon/search.hpp"
#include "algcon/threads.hpp"
#include "algcon/transform.hpp"

namespace algcon {

/// Fixed fingerprint seed for census grouping keys; keys from different runs
/// stay comparable.
inline constexpr std::uint64_t kCensusFpSeed = 0xa1b2c3d4e5f60789ULL;

/// All bijective renamings of `vars` onto itself, deterministic order.
inline std::vector<std::map<std::string, std::string>> variable_renamings(
    std::vector<std::string> vars) {
    std::sort(vars.begin(), vars.end());
    std::vector<std::string> image = vars;
    std::vector<std::map<std::string, std::string>> out;
    do {
        std::map<std::string, std::string> m;
        for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = image[i];
        out.push_back(std::move(m));
    } while (std::next_permutation(image.begin(), image.end()));
    return out;
}

/// Relabeling-invariant grouping key for a polynomial: the minimum over all
/// variable permutations of the projectively normalized fingerprint.
inline std::string canonical_core_key(const Polynomial& core, const std::vector<std::string>& vars,
                                      std::uint64_t fp_seed = kCensusFpSeed) {
    std::optional<std::string> best;
    for (const auto& ren : variable_renamings(vars)) {
        std::string key = normalized_key(fingerprint(core.renamed(ren), fp_seed));
        if (!best || key < *best) best = std::move(key);
    }
    return *best;
}

/// The algebraic equivalence-class signature of a graph: the multiset of
/// core-constraint fingerprints after simplify and peel, for one validated
/// family, minimized over node relabelings. Graphs without an identifying
/// family get a marker plus their canonical form.
inline std::string class_signature(const MixedGraph& g,
                                   std::optional<IdentifyingFamily> fam = std::nullopt,
                                   int cap = 12) {
    if (!fam) {
        fam = find_identifying_family(g);
        if (!fam) return "non-HTC|" + canonical_form(g);
    }
    std::vector<Polynomial> cores;
    for (const auto& d : derive_all(g, *fam)) {
        SimplifyResult simp = simplify(d.gc, SeedSlots{d.seed_slots.first, d.seed_slots.second});
        PatternMatrix m = simp.core.build_matrix();
        if (m.dim() > cap) {
            // too large to peel symbolically; fall back to the raw core
            cores.push_back(Polynomial());
            continue;
        }
        Polynomial p = det_expand(m, cap);
        cores.push_back(peel_principal_minors(p, g.nodes(), cap).core.canonical_sign());
    }
    std::optional<std::string> best;
    for (const auto& ren : variable_renamings(g.nodes())) {
        std::vector<std::string> keys;
        for (const auto& c : cores)
            keys.push_back(c.is_zero() ? std::string("<cap>")
                                       : normalized_key(fingerprint(c.renamed(ren), kCensusFpSeed)));
        std::sort(keys.begin(), keys.end());
        std::string joined;
        for (const auto& k : keys) joined += k + "|";
        if (!best || joined < *best) best = std::move(joined);
    }
    return best ? *best : "empty|";
}

// --------------------------------------------------------------------------
// census

struct CensusOptions {
    int n = 4;
    int m_min = 5;
    int m_max = -1;      // -1: up to the slot count (edges at-least mode)
    bool edges_exact = false;
    bool allow_bows = true;
    bool allow_cycles = true;
    bool one_constraint_only = true; // keep only codimension-1 classes
    enum class FamilyMode { pa_only, enumerate_all };
    FamilyMode family_mode = FamilyMode::enumerate_all;
    std::uint64_t seed = 1;
    int threads = 1;
    int expansion_cap = 12;
    std::size_t family_limit = 64;
    int cross_samples = 10;
    int search_slots = 0; // >0: vanishing-constraint search for non-HTC classes
    std::string checkpoint;
};

/// Per-(family, pair) derivation record of one iso-class representative.
struct DerivationRecord {
    std::string raw_key;       // canonical key of peel(raw det).core
    std::string simp_key;      // canonical key of peel(simplified core det).core
    std::string simp_core_text; // polynomial text of the simplified+peeled core
    int simp_core_degree = -1;
    bool simp_is_tree = true;
    bool core_vanishes = true; // simplified core vanishes on model samples
    bool i_certified = false;
    bool expansion_infeasible = false;
    std::string simp_gc_json;  // best simplified constraint (serialized)
};

/// Analysis of one graph-isomorphism class.
struct MemberAnalysis {
    std::string canon;
    std::string rep_serialized;
    int m = 0;
    long labelled = 0;
    int codim = -1;
    bool htc = false;
    std::vector<DerivationRecord> records;
    std::string member_key;    // canonical key of the best core; "nonhtc:" marker otherwise
    std::string best_core_text;
    int best_core_degree = -1;
    bool anomaly = false;      // seed component did not vanish; a factor did
};

struct CensusClassReport {
    std::string key;
    std::string core_text;
    int codim = 1;
    int degree = -1;
    std::vector<std::string> member_canons;
    long labelled_total = 0;
    bool tree_pd_certified = false; // tree-shaped form whose peel residual is the class core
    bool primary_certified = false; // some form's determinant IS the class core
    bool raw_fail_any = false;      // some member+family raw output not PD-certified
    bool simp_fail_any = false;     // still not certified after simplify (all orders)
    bool i_certified_all = true;
    int non_htc_members = 0;
    std::string resolved_by;        // htc | merged | vanish-match | search | unresolved
};

struct CensusReport {
    // options echo
    int n = 0, m_min = 0, m_max = 0;
    bool edges_exact = false, allow_bows = true, allow_cycles = true;
    std::uint64_t seed = 0;
    std::string family_mode;
    // results
    long labelled_graphs = 0;
    long iso_classes = 0;
    long codim1_iso_classes = 0;
    std::vector<CensusClassReport> classes; // one-constraint classes
    long one_constraint_classes = 0;
    long raw_fail_classes = 0;
    long simp_fail_classes = 0;
    long tree_pd_certified_classes = 0;
    long anomalies = 0;
    long expansion_infeasible_members = 0;
    bool invariants_ok = true;
    std::vector<std::string> notes;
};

namespace detail {

inline CovarianceMatrix member_model_sigma(const MixedGraph& rep, const std::string& canon,
                                           std::uint64_t seed, int i) {
    std::uint64_t s = derive_seed(seed, fnv1a64(canon) + static_cast<std::uint64_t>(i) * 1000003ULL);
    return covariance(sample_parameters(rep, s));
}

inline bool poly_vanishes_on(const Polynomial& p, const CovarianceMatrix& sigma) {
    return evaluate_at(p, [&](const std::string& v, const std::string& w) -> Rat {
               return sigma.at(v, w);
           }) == 0;
}

struct IsoEntry {
    std::string rep_serialized; // lexicographically smallest member; shard-independent
    long count = 0;
    int m = 0;
};

inline Json derivation_to_json(const DerivationRecord& r) {
    return Json{{"raw_key", r.raw_key},
                {"simp_key", r.simp_key},
                {"simp_core", r.simp_core_text},
                {"simp_core_degree", r.simp_core_degree},
                {"simp_is_tree", r.simp_is_tree},
                {"core_vanishes", r.core_vanishes},
                {"i_certified", r.i_certified},
                {"expansion_infeasible", r.expansion_infeasible},
                {"simp_gc", r.simp_gc_json}};
}

inline DerivationRecord derivation_from_json(const Json& j) {
    DerivationRecord r;
    r.raw_key = j.at("raw_key").get<std::string>();
    r.simp_key = j.at("simp_key").get<std::string>();
    r.simp_core_text = j.at("simp_core").get<std::string>();
    r.simp_core_degree = j.at("simp_core_degree").get<int>();
    r.simp_is_tree = j.at("simp_is_tree").get<bool>();
    r.core_vanishes = j.at("core_vanishes").get<bool>();
    r.i_certified = j.at("i_certified").get<bool>();
    r.expansion_infeasible = j.at("expansion_infeasible").get<bool>();
    r.simp_gc_json = j.at("simp_gc").get<std::string>();
    return r;
}

inline Json member_to_json(const MemberAnalysis& a) {
    Json recs = Json::array();
    for (const auto& r : a.records) recs.push_back(derivation_to_json(r));
    return Json{{"canon", a.canon},       {"rep", a.rep_serialized}, {"m", a.m},
                {"labelled", a.labelled}, {"codim", a.codim},        {"htc", a.htc},
                {"records", recs},        {"member_key", a.member_key},
                {"best_core", a.best_core_text}, {"best_core_degree", a.best_core_degree},
                {"anomaly", a.anomaly}};
}

inline MemberAnalysis member_from_json(const Json& j) {
    MemberAnalysis a;
    a.canon = j.at("canon").get<std::string>();
    a.rep_serialized = j.at("rep").get<std::string>();
    a.m = j.at("m").get<int>();
    a.labelled = j.at("labelled").get<long>();
    a.codim = j.at("codim").get<int>();
    a.htc = j.at("htc").get<bool>();
    for (const auto& r : j.at("records")) a.records.push_back(derivation_from_json(r));
    a.member_key = j.at("member_key").get<std::string>();
    a.best_core_text = j.at("best_core").get<std::string>();
    a.best_core_degree = j.at("best_core_degree").get<int>();
    a.anomaly = j.at("anomaly").get<bool>();
    return a;
}

/// Families the census walks for a representative, per the family mode.
inline std::vector<IdentifyingFamily> census_families(const MixedGraph& rep,
                                                      const CensusOptions& opts) {
    if (opts.family_mode == CensusOptions::FamilyMode::pa_only) {
        IdentifyingFamily fam;
        for (const auto& v : rep.nodes()) fam.sets[v] = rep.parents(v);
        for (auto& [v, ys] : fam.sets) {
            (void)v;
            std::sort(ys.begin(), ys.end());
        }
        // greedy order on the dependency digraph
        const int n = rep.size();
        std::vector<bool> placed(static_cast<std::size_t>(n), false);
        for (int step = 0; step < n; ++step) {
            int chosen = -1;
            for (int v = 0; v < n && chosen < 0; ++v) {
                if (placed[static_cast<std::size_t>(v)]) continue;
                auto htr = rep.half_trek_mask(v);
                bool ok = true;
                for (const auto& y : fam.sets[rep.name(v)])
                    if (htr[static_cast<std::size_t>(rep.index_of(y))] &&
                        !placed[static_cast<std::size_t>(rep.index_of(y))]) {
                        ok = false;
                        break;
                    }
                if (ok) chosen = v;
            }
            if (chosen < 0) return {};
            placed[static_cast<std::size_t>(chosen)] = true;
            fam.order.push_back(rep.name(chosen));
        }
        try {
            if (!validate_family(rep, fam)) return {};
        } catch (const Error&) {
            return {};
        }
        return {fam};
    }
    return enumerate_identifying_families(rep, opts.family_limit);
}

} // namespace detail

/// Analyzes one iso-class representative: codimension, identifying families,
/// derivations with raw/simplified peeled cores, certificates.
inline MemberAnalysis analyze_member(const MixedGraph& rep, const std::string& canon, int m,
                                     long labelled, const CensusOptions& opts) {
    MemberAnalysis a;
    a.canon = canon;
    a.rep_serialized = rep.serialize();
    a.m = m;
    a.labelled = labelled;
    a.codim = model_codimension(rep, opts.seed);
    if (a.codim == 0) {
        a.member_key = "saturated"; // no constraints; all such algebraic models coincide
        return a;
    }
    if (opts.one_constraint_only && a.codim != 1) {
        a.member_key = "codim:" + std::to_string(a.codim);
        return a;
    }
    auto families = detail::census_families(rep, opts);
    const bool multi = a.codim > 1;
    a.htc = !families.empty();
    if (!a.htc) {
        a.member_key = "nonhtc:" + canon;
        return a;
    }
    // model samples for vanishing checks
    std::vector<CovarianceMatrix> samples;
    for (int i = 0; i < 5; ++i)
        samples.push_back(detail::member_model_sigma(rep, canon, opts.seed, i));

    const auto& vars = rep.nodes();
    std::optional<Polynomial> best;
    std::string best_key;
    for (const auto& fam : families) {
        std::vector<DerivedConstraint> derived;
        try {
            derived = derive_all(rep, fam);
        } catch (const CycleInIdentificationError&) {
            continue; // invalid family slipped the enumeration; skip it
        }
        for (const auto& d : derived) {
            DerivationRecord rec;
            rec.i_certified =
                i_primary_certificate(rep, fam, d, opts.expansion_cap) == IVerdict::certified;
            PatternMatrix raw_m = d.gc.build_matrix();
            if (raw_m.dim() > opts.expansion_cap) {
                rec.expansion_infeasible = true;
                a.records.push_back(std::move(rec));
                continue;
            }
            Polynomial raw = det_expand(raw_m, opts.expansion_cap);
            if (raw.is_zero()) {
                rec.expansion_infeasible = true; // degenerate; should not happen
                a.records.push_back(std::move(rec));
                continue;
            }
            Polynomial raw_core = peel_principal_minors(raw, vars, opts.expansion_cap).core;
            rec.raw_key = canonical_core_key(raw_core, vars);

            SimplifyResult simp =
                simplify(d.gc, SeedSlots{d.seed_slots.first, d.seed_slots.second});
            GraphicalConstraint core_gc = simp.core;
            PatternMatrix simp_m = core_gc.build_matrix();
            Polynomial simp_core;
            if (simp_m.dim() <= opts.expansion_cap) {
                Polynomial sp = det_expand(simp_m, opts.expansion_cap);
                simp_core = peel_principal_minors(sp, vars, opts.expansion_cap).core;
            } else {
                rec.expansion_infeasible = true;
                a.records.push_back(std::move(rec));
                continue;
            }
            // the core must vanish on model samples; if a split-off factor
            // carries the constraint instead, switch to it and flag
            auto vanishes = [&](const Polynomial& p) {
                for (const auto& s : samples)
                    if (!detail::poly_vanishes_on(p, s)) return false;
                return true;
            };
            if (!vanishes(simp_core)) {
                bool fixed = false;
                for (const auto& f : simp.factors) {
                    PatternMatrix fm = f.build_matrix();
                    if (fm.dim() > opts.expansion_cap) continue;
                    Polynomial fp = det_expand(fm, opts.expansion_cap);
                    if (fp.is_zero()) continue;
                    Polynomial fcore = peel_principal_minors(fp, vars, opts.expansion_cap).core;
                    if (vanishes(fcore)) {
                        simp_core = std::move(fcore);
                        core_gc = f;
                        fixed = true;
                        break;
                    }
                }
                a.anomaly = true;
                rec.core_vanishes = fixed;
            }
            simp_core = simp_core.canonical_sign();
            rec.simp_key = canonical_core_key(simp_core, vars);
            rec.simp_core_text = simp_core.to_text();
            rec.simp_core_degree = simp_core.degree();
            rec.simp_is_tree = core_gc.is_tree();
            rec.simp_gc_json = constraint_to_json(core_gc).dump();
            if (rec.core_vanishes &&
                (!best || simp_core.degree() < best->degree() ||
                 (simp_core.degree() == best->degree() && rec.simp_key < best_key))) {
                best = simp_core;
                best_key = rec.simp_key;
            }
            a.records.push_back(std::move(rec));
        }
    }
    if (multi) {
        // codimension >= 2: the signature is the multiset of core keys from
        // the first family's derivations
        std::vector<std::string> keys;
        std::size_t first_family_records = 0;
        if (!families.empty()) {
            try {
                first_family_records = constraint_pairs(rep, families.front()).size();
            } catch (const Error&) {
                first_family_records = 0;
            }
        }
        for (std::size_t i = 0; i < a.records.size() && i < first_family_records; ++i)
            keys.push_back(a.records[i].expansion_infeasible ? "<cap>" : a.records[i].simp_key);
        std::sort(keys.begin(), keys.end());
        std::string joined = "multi:";
        for (const auto& k : keys) joined += k + "|";
        a.member_key = joined;
        return a;
    }
    if (best) {
        a.member_key = best_key;
        a.best_core_text = best->to_text();
        a.best_core_degree = best->degree();
    } else {
        a.member_key = "infeasible:" + canon;
    }
    return a;
}

/// The Table-1 style census: enumerate graphs, reduce to isomorphism
/// classes, analyze each representative, group into algebraic equivalence
/// classes by canonicalized core fingerprints, cross-validate by vanishing,
/// and tally certification statistics.
inline CensusReport census(const CensusOptions& opts_in) {
    CensusOptions opts = opts_in;
    if (opts.n > 5)
        throw Error("census budget: node counts above 5 are outside the default budget "
                    "(enumeration and relabeling-canonical grouping are super-exponential)");
    const int slots = 3 * opts.n * (opts.n - 1) / 2;
    if (opts.edges_exact || opts.m_max < 0) opts.m_max = opts.edges_exact ? opts.m_min : slots;

    CensusReport rep;
    rep.n = opts.n;
    rep.m_min = opts.m_min;
    rep.m_max = opts.m_max;
    rep.edges_exact = opts.edges_exact;
    rep.allow_bows = opts.allow_bows;
    rep.allow_cycles = opts.allow_cycles;
    rep.seed = opts.seed;
    rep.family_mode =
        opts.family_mode == CensusOptions::FamilyMode::pa_only ? "pa-only" : "enumerate-all";

    // ---- stage 1: isomorphism classes --------------------------------
    std::map<std::string, detail::IsoEntry> iso;
    std::mutex iso_mu;
    EnumOptions eopts{opts.allow_bows, opts.allow_cycles};
    for (int m = opts.m_min; m <= opts.m_max; ++m) {
        unsigned long long space = enumeration_space(opts.n, m);
        if (space == 0) continue;
        int shards = std::max(1, opts.threads * 4);
        unsigned long long chunk = (space + static_cast<unsigned long long>(shards) - 1) /
                                   static_cast<unsigned long long>(shards);
        parallel_for_indexed(static_cast<std::size_t>(shards), opts.threads, [&](std::size_t si) {
            unsigned long long lo = chunk * si;
            unsigned long long hi = std::min(space, lo + chunk);
            if (lo >= hi) return;
            std::map<std::string, detail::IsoEntry> local;
            enumerate_graphs(opts.n, m, eopts,
                             [&](const MixedGraph& g) {
                                 std::string canon = canonical_form(g);
                                 auto& e = local[canon];
                                 ++e.count;
                                 e.m = m;
                                 std::string ser = g.serialize();
                                 if (e.rep_serialized.empty() || ser < e.rep_serialized)
                                     e.rep_serialized = std::move(ser);
                             },
                             lo, hi);
            std::lock_guard<std::mutex> lock(iso_mu);
            for (auto& [canon, e] : local) {
                auto& dst = iso[canon];
                dst.count += e.count;
                dst.m = e.m;
                if (dst.rep_serialized.empty() || e.rep_serialized < dst.rep_serialized)
                    dst.rep_serialized = e.rep_serialized;
            }
        });
    }
    std::vector<std::pair<std::string, detail::IsoEntry>> iso_vec(iso.begin(), iso.end());
    std::sort(iso_vec.begin(), iso_vec.end(), [](const auto& a, const auto& b) {
        if (a.second.m != b.second.m) return a.second.m < b.second.m;
        return a.first < b.first;
    });
    for (const auto& [c, e] : iso_vec) {
        (void)c;
        rep.labelled_graphs += e.count;
    }
    rep.iso_classes = static_cast<long>(iso_vec.size());

    // ---- stage 2: per-class analysis (checkpointed) -------------------
    std::map<std::string, MemberAnalysis> checkpointed;
    if (!opts.checkpoint.empty()) {
        std::ifstream in(opts.checkpoint);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                MemberAnalysis a = detail::member_from_json(Json::parse(line));
                checkpointed[a.canon] = std::move(a);
            } catch (...) {
                rep.notes.push_back("checkpoint: skipped one unreadable line");
            }
        }
    }
    std::vector<MemberAnalysis> members(iso_vec.size());
    std::mutex ckpt_mu;
    std::ofstream ckpt_out;
    if (!opts.checkpoint.empty())
        ckpt_out.open(opts.checkpoint, std::ios::app);
    parallel_for_indexed(iso_vec.size(), opts.threads, [&](std::size_t i) {
        const auto& [canon, entry] = iso_vec[i];
        auto it = checkpointed.find(canon);
        if (it != checkpointed.end()) {
            members[i] = it->second;
            members[i].labelled = entry.count; // counts come from this run
            return;
        }
        MixedGraph g = MixedGraph::parse(entry.rep_serialized);
        members[i] = analyze_member(g, canon, entry.m, entry.count, opts);
        if (ckpt_out.is_open()) {
            std::string line = detail::member_to_json(members[i]).dump();
            std::lock_guard<std::mutex> lock(ckpt_mu);
            ckpt_out << line << '\n';
            ckpt_out.flush();
        }
    });

    // ---- stage 3: grouping --------------------------------------------
    for (const auto& a : members) {
        if (a.anomaly) ++rep.anomalies;
        for (const auto& r : a.records)
            if (r.expansion_infeasible) {
                ++rep.expansion_infeasible_members;
                break;
            }
    }
    if (rep.expansion_infeasible_members > 0)
        rep.notes.push_back(
            "coverage: " + std::to_string(rep.expansion_infeasible_members) +
            " iso classes had derivations above the expansion cap (" +
            std::to_string(opts.expansion_cap) +
            "); their records are fingerprint-only and peel-based certificates are unknown");
    struct Group {
        Polynomial core;
        std::vector<std::size_t> member_idx;
        std::string resolved_by = "htc";
        int codim = 1;
    };
    std::map<std::string, Group> groups; // key -> group
    std::vector<std::size_t> non_htc, infeasible;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& a = members[i];
        if (a.codim == 1) ++rep.codim1_iso_classes;
        if (a.codim != 1) {
            if (opts.one_constraint_only) continue;
            auto& g = groups[a.member_key];
            g.codim = a.codim;
            g.resolved_by = a.codim == 0 ? "saturated" : (a.htc ? "multi" : "unresolved");
            g.member_idx.push_back(i);
            continue;
        }
        if (!a.htc) {
            non_htc.push_back(i);
            continue;
        }
        if (a.best_core_degree < 0) {
            infeasible.push_back(i);
            continue;
        }
        auto& g = groups[a.member_key];
        if (g.member_idx.empty()) g.core = Polynomial::parse(a.best_core_text);
        g.member_idx.push_back(i);
    }

    // merge pass: a group whose core is a proper multiple of another group's
    // core (under some relabeling) and whose model satisfies that smaller
    // core belongs to the smaller core's class
    {
        std::vector<std::string> keys;
        for (const auto& [k, g] : groups) {
            (void)g;
            keys.push_back(k);
        }
        std::vector<std::string> names;
        for (int i = 0; i < opts.n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
        auto renamings = variable_renamings(names);
        bool merged = true;
        while (merged) {
            merged = false;
            for (const auto& kj : keys) {
                auto jt = groups.find(kj);
                if (jt == groups.end() || jt->second.codim != 1 || jt->second.core.is_zero())
                    continue;
                for (const auto& ki : keys) {
                    if (ki == kj) continue;
                    auto it = groups.find(ki);
                    if (it == groups.end() || it->second.codim != 1 || it->second.core.is_zero())
                        continue;
                    if (it->second.core.degree() >= jt->second.core.degree()) continue;
                    // some relabeling of the smaller core must divide the
                    // bigger one and vanish on the bigger group's samples
                    for (const auto& ren : renamings) {
                        Polynomial small = it->second.core.renamed(ren);
                        auto q = jt->second.core.divide_exact(small);
                        if (!q || q->is_constant()) continue;
                        const auto& a = members[jt->second.member_idx.front()];
                        MixedGraph rg = MixedGraph::parse(a.rep_serialized);
                        bool vanish = true;
                        for (int s = 0; s < 5 && vanish; ++s) {
                            auto sigma = detail::member_model_sigma(rg, a.canon, opts.seed, s);
                            vanish = detail::poly_vanishes_on(small, sigma);
                        }
                        if (!vanish) continue;
                        for (auto mi : jt->second.member_idx)
                            it->second.member_idx.push_back(mi);
                        it->second.resolved_by = "merged";
                        groups.erase(jt);
                        merged = true;
                        break;
                    }
                    if (merged) break;
                }
                if (merged) break;
            }
        }
    }

    // non-HTC members: try existing cores under all relabelings; optional
    // brute-force vanishing search; otherwise an unresolved singleton
    for (std::size_t idx : non_htc) {
        const auto& a = members[idx];
        MixedGraph rg = MixedGraph::parse(a.rep_serialized);
        std::vector<CovarianceMatrix> samples;
        for (int s = 0; s < opts.cross_samples; ++s)
            samples.push_back(detail::member_model_sigma(rg, a.canon, opts.seed, s));
        auto renamings = variable_renamings(rg.nodes());
        bool assigned = false;
        for (auto& [key, grp] : groups) {
            (void)key;
            if (grp.codim != 1 || grp.core.is_zero()) continue;
            for (const auto& ren : renamings) {
                Polynomial cand = grp.core.renamed(ren);
                bool vanish = true;
                for (const auto& s : samples)
                    if (!detail::poly_vanishes_on(cand, s)) {
                        vanish = false;
                        break;
                    }
                if (vanish) {
                    grp.member_idx.push_back(idx);
                    if (grp.resolved_by == "htc") grp.resolved_by = "vanish-match";
                    assigned = true;
                    break;
                }
            }
            if (assigned) break;
        }
        if (assigned) continue;
        if (opts.search_slots > 0) {
            SearchBounds b;
            b.max_slots = opts.search_slots;
            auto found = find_vanishing_constraints(
                rg.nodes(), b, samples.size(),
                [&](std::size_t s, const std::string& v, const std::string& w) -> Rat {
                    return samples[s].at(v, w);
                });
            if (!found.empty()) {
                PatternMatrix m = found.front().build_matrix();
                Polynomial p = det_expand(m, opts.expansion_cap);
                Polynomial core =
                    peel_principal_minors(p, rg.nodes(), opts.expansion_cap).core.canonical_sign();
                std::string key = canonical_core_key(core, rg.nodes());
                auto& grp = groups[key];
                if (grp.member_idx.empty()) {
                    grp.core = core;
                    grp.resolved_by = "search";
                }
                grp.member_idx.push_back(idx);
                continue;
            }
        }
        Group g;
        g.core = Polynomial();
        g.resolved_by = "unresolved";
        g.member_idx.push_back(idx);
        groups.emplace("nonhtc:" + a.canon, std::move(g));
    }
    for (std::size_t idx : infeasible) {
        Group g;
        g.core = Polynomial();
        g.resolved_by = "unresolved";
        g.member_idx.push_back(idx);
        groups.emplace("infeasible:" + members[idx].canon, std::move(g));
    }

    // ---- stage 4: per-class statistics --------------------------------
    for (auto& [key, grp] : groups) {
        CensusClassReport c;
        c.key = key;
        c.codim = grp.codim;
        c.resolved_by = grp.resolved_by;
        if (!grp.core.is_zero()) {
            c.degree = grp.core.degree();
            if (grp.core.term_count() <= 64) c.core_text = grp.core.to_text();
        }
        std::string class_key = key;
        for (std::size_t mi : grp.member_idx) {
            const auto& a = members[mi];
            c.member_canons.push_back(a.canon);
            c.labelled_total += a.labelled;
            if (!a.htc) ++c.non_htc_members;
            bool member_simp_ok = false;
            for (const auto& r : a.records) {
                if (r.expansion_infeasible) continue;
                if (r.raw_key != class_key) c.raw_fail_any = true;
                if (r.simp_key == class_key) {
                    member_simp_ok = true;
                    if (r.simp_is_tree) c.tree_pd_certified = true;
                    if (r.simp_core_degree == c.degree) {
                        // determinant of the simplified form equals the core
                        // exactly when nothing was peeled: compare texts
                        GraphicalConstraint gc = constraint_from_json(Json::parse(r.simp_gc_json));
                        if (gc.slots_a() == c.degree) c.primary_certified = true;
                    }
                }
                if (!r.i_certified) c.i_certified_all = false;
            }
            if (a.htc && !member_simp_ok && !a.records.empty()) {
                // greedy order failed; retry all orders before declaring failure
                bool rescued = false;
                MixedGraph rg = MixedGraph::parse(a.rep_serialized);
                for (const auto& fam : detail::census_families(rg, opts)) {
                    for (const auto& d : derive_all(rg, fam)) {
                        for (const auto& alt :
                             simplify_all_orders(d.gc, SeedSlots{d.seed_slots.first,
                                                                 d.seed_slots.second})) {
                            PatternMatrix m = alt.core.build_matrix();
                            if (m.dim() > opts.expansion_cap) continue;
                            Polynomial p = det_expand(m, opts.expansion_cap);
                            if (p.is_zero()) continue;
                            Polynomial acore =
                                peel_principal_minors(p, rg.nodes(), opts.expansion_cap).core;
                            if (canonical_core_key(acore, rg.nodes()) == class_key) {
                                rescued = true;
                                break;
                            }
                        }
                        if (rescued) break;
                    }
                    if (rescued) break;
                }
                if (!rescued) c.simp_fail_any = true;
            }
        }
        std::sort(c.member_canons.begin(), c.member_canons.end());
        rep.classes.push_back(std::move(c));
    }
    std::sort(rep.classes.begin(), rep.classes.end(),
              [](const CensusClassReport& a, const CensusClassReport& b) {
                  if (a.codim != b.codim) return a.codim < b.codim;
                  if (a.degree != b.degree) return a.degree < b.degree;
                  return a.key < b.key;
              });
    for (const auto& c : rep.classes) {
        if (c.codim != 1) continue;
        ++rep.one_constraint_classes;
        if (c.raw_fail_any) ++rep.raw_fail_classes;
        if (c.simp_fail_any) ++rep.simp_fail_classes;
        if (c.tree_pd_certified) ++rep.tree_pd_certified_classes;
    }

    // cross-vanishing invariant: samples of every member satisfy the class
    // core under some relabeling
    for (const auto& c : rep.classes) {
        if (c.core_text.empty() && c.degree < 0) continue; // unresolved
        auto git = groups.find(c.key);
        if (git == groups.end() || git->second.core.is_zero()) continue;
        for (const auto& canon : c.member_canons) {
            for (const auto& a : members) {
                if (a.canon != canon) continue;
                MixedGraph rg = MixedGraph::parse(a.rep_serialized);
                auto renamings = variable_renamings(rg.nodes());
                bool ok = false;
                for (const auto& ren : renamings) {
                    Polynomial cand = git->second.core.renamed(ren);
                    bool vanish = true;
                    for (int s = 0; s < opts.cross_samples && vanish; ++s)
                        vanish = detail::poly_vanishes_on(
                            cand, detail::member_model_sigma(rg, a.canon, opts.seed, s));
                    if (vanish) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) {
                    rep.invariants_ok = false;
                    rep.notes.push_back("cross-vanishing failed for member " + canon);
                }
                break;
            }
        }
    }
    return rep;
}

inline Json report_to_json(const CensusReport& r) {
    Json classes = Json::array();
    for (const auto& c : r.classes)
        classes.push_back(Json{{"key", c.key},
                               {"codim", c.codim},
                               {"degree", c.degree},
                               {"core", c.core_text},
                               {"members", c.member_canons},
                               {"labelled_total", c.labelled_total},
                               {"tree_pd_certified", c.tree_pd_certified},
                               {"primary_certified", c.primary_certified},
                               {"raw_fail_any", c.raw_fail_any},
                               {"simp_fail_any", c.simp_fail_any},
                               {"i_certified_all", c.i_certified_all},
                               {"non_htc_members", c.non_htc_members},
                               {"resolved_by", c.resolved_by}});
    return Json{{"options",
                 Json{{"n", r.n},
                      {"m_min", r.m_min},
                      {"m_max", r.m_max},
                      {"edges_exact", r.edges_exact},
                      {"allow_bows", r.allow_bows},
                      {"allow_cycles", r.allow_cycles},
                      {"seed", r.seed},
                      {"family_mode", r.family_mode}}},
                {"labelled_graphs", r.labelled_graphs},
                {"iso_classes", r.iso_classes},
                {"codim1_iso_classes", r.codim1_iso_classes},
                {"one_constraint_classes", r.one_constraint_classes},
                {"raw_fail_classes", r.raw_fail_classes},
                {"simp_fail_classes", r.simp_fail_classes},
                {"tree_pd_certified_classes", r.tree_pd_certified_classes},
                {"anomalies", r.anomalies},
                {"expansion_infeasible_members", r.expansion_infeasible_members},
                {"invariants_ok", r.invariants_ok},
                {"notes", r.notes},
                {"classes", classes}};
}

/// Light structural validation against the shipped census report schema.
inline bool validate_report_json(const Json& j, std::string* err = nullptr) {
    auto fail = [&](const std::string& m) {
        if (err) *err = m;
        return false;
    };
    for (const char* k :
         {"options", "labelled_graphs", "iso_classes", "one_constraint_classes", "classes",
          "invariants_ok", "raw_fail_classes", "simp_fail_classes", "tree_pd_certified_classes"})
        if (!j.contains(k)) return fail(std::string("missing key ") + k);
    if (!j.at("classes").is_array()) return fail("classes must be an array");
    for (const auto& c : j.at("classes"))
        for (const char* k : {"key", "degree", "members", "tree_pd_certified", "resolved_by"})
            if (!c.contains(k)) return fail(std::string("class missing key ") + k);
    for (const char* k : {"n", "m_min", "m_max", "seed"})
        if (!j.at("options").contains(k)) return fail(std::string("options missing key ") + k);
    return true;
}

/// Text rendering that mirrors the census table's row structure: classes are
/// bucketed by certification level, with a total row.
inline std::string render_text_table(const CensusReport& r) {
    long primary_tree = 0, pd_tree = 0, unknown = 0, other = 0;
    for (const auto& c : r.classes) {
        if (c.codim != 1)
            ++other;
        else if (c.primary_certified && c.tree_pd_certified)
            ++primary_tree;
        else if (c.tree_pd_certified)
            ++pd_tree;
        else
            ++unknown;
    }
    std::ostringstream out;
    out << "census: n=" << r.n << " edges " << (r.edges_exact ? "exactly " : "at least ")
        << r.m_min << (r.edges_exact ? "" : " (up to " + std::to_string(r.m_max) + ")")
        << ", bows " << (r.allow_bows ? "yes" : "no") << ", cycles "
        << (r.allow_cycles ? "yes" : "no") << ", family mode " << r.family_mode << "\n";
    out << "labelled graphs:        " << r.labelled_graphs << "\n";
    out << "isomorphism classes:    " << r.iso_classes << "\n";
    out << "codim-1 iso classes:    " << r.codim1_iso_classes << "\n\n";
    out << "one-constraint classes by certification:\n";
    out << "primary-certified  PD-certified   classes\n";
    out << "tree               tree           " << primary_tree << "\n";
    out << "?                  tree           " << pd_tree << "\n";
    out << "?                  ?              " << unknown << "\n";
    out << "total                             " << r.one_constraint_classes << "\n";
    if (other > 0) out << "(other classes: " << other << " saturated/multi-constraint)\n";
    out << "\n";
    out << "raw non-PD-certified classes:     " << r.raw_fail_classes << "\n";
    out << "after simplify still failing:     " << r.simp_fail_classes << "\n";
    out << "invariants: " << (r.invariants_ok ? "ok" : "VIOLATED") << "\n";
    return out.str();
}

} // namespace algcon

#endif // ALGCON_STUDY_HPP
