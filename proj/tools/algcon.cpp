// algcon: derive, verify, transform, classify, search, census for the
// determinantal constraints that linear structural equation models impose on
// observed covariance matrices.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "algcon/classify.hpp"
#include "algcon/construct.hpp"
#include "algcon/json_io.hpp"
#include "algcon/oracle.hpp"
#include "algcon/search.hpp"
#include "algcon/study.hpp"
#include "algcon/transform.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw algcon::Error("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

algcon::MixedGraph load_graph(const std::string& path) {
    return algcon::MixedGraph::parse(slurp(path));
}

algcon::GraphicalConstraint load_constraint(const std::string& path) {
    return algcon::constraint_from_json(algcon::Json::parse(slurp(path)));
}

std::pair<std::string, std::string> parse_pair(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw algcon::Error("pair must look like v,w (got '" + s + "')");
    return {s.substr(0, comma), s.substr(comma + 1)};
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace algcon;

    CLI::App app{"graphical constraints of linear structural equation models"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "json";
    app.add_option("--seed", seed, "global random seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--format", format, "output format: json or text")
        ->check(CLI::IsMember({"json", "text", "text-table"}))
        ->capture_default_str();

    // ---- derive ----
    auto* cmd_derive = app.add_subcommand("derive", "run the HTC-based constraint construction");
    std::string d_graph, d_family, d_pair;
    cmd_derive->add_option("--graph", d_graph, "graph file")->required();
    cmd_derive->add_option("--family", d_family, "identifying family JSON (default: search)");
    cmd_derive->add_option("--pair", d_pair, "single constraint pair v,w (default: all)");

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "vanishing battery for a constraint");
    std::string v_graph, v_constraint, v_sigma;
    int v_trials = 25;
    cmd_verify->add_option("--graph", v_graph, "graph file")->required();
    cmd_verify->add_option("--constraint", v_constraint, "constraint JSON file")->required();
    cmd_verify->add_option("--trials", v_trials, "trial count")->capture_default_str();
    cmd_verify->add_option("--sigma", v_sigma, "also test one covariance file exactly");

    // ---- transform ----
    auto* cmd_transform = app.add_subcommand("transform", "strip spurious factors");
    std::string t_constraint;
    bool t_all_orders = false;
    cmd_transform->add_option("--constraint", t_constraint, "constraint JSON file")->required();
    cmd_transform->add_flag("--all-orders", t_all_orders, "explore every candidate order");

    // ---- classify ----
    auto* cmd_classify = app.add_subcommand("classify", "PD/I-primary certificates");
    std::string c_graph, c_family, c_core;
    int c_cap = 12;
    cmd_classify->add_option("--graph", c_graph, "graph file")->required();
    cmd_classify->add_option("--family", c_family, "identifying family JSON (default: search)");
    cmd_classify->add_option("--core", c_core, "reference core constraint JSON");
    cmd_classify->add_option("--cap", c_cap, "expansion cap")->capture_default_str();

    // ---- search ----
    auto* cmd_search = app.add_subcommand("search", "brute-force graphical forms of a polynomial");
    std::string s_target, s_vars;
    SearchBounds s_bounds;
    bool s_scalar = false;
    cmd_search->add_option("--target", s_target, "polynomial text file")->required();
    cmd_search->add_option("--vars", s_vars, "comma-separated model variables")->required();
    cmd_search->add_option("--max-slots", s_bounds.max_slots, "matrix dimension cap")
        ->capture_default_str();
    cmd_search->add_option("--max-nodes", s_bounds.max_nodes, "nodes per part cap")
        ->capture_default_str();
    cmd_search->add_flag("--trees-only", s_bounds.trees_only, "only tree-shaped constraints");
    cmd_search->add_flag("--up-to-scalar", s_scalar, "match up to a scalar factor");

    // ---- census ----
    auto* cmd_census = app.add_subcommand("census", "algebraic equivalence-class census");
    CensusOptions census_opts;
    std::string edges_mode = "at-least";
    std::string family_mode = "all";
    bool no_bows = false, no_cycles = false, all_classes = false;
    cmd_census->add_option("--n", census_opts.n, "node count")->capture_default_str();
    cmd_census->add_option("--m", census_opts.m_min, "edge count (minimum or exact)")
        ->capture_default_str();
    cmd_census->add_option("--edges", edges_mode, "edge mode: exact or at-least")
        ->check(CLI::IsMember({"exact", "at-least"}))
        ->capture_default_str();
    cmd_census->add_flag("--no-bows", no_bows, "exclude graphs with bows");
    cmd_census->add_flag("--no-cycles", no_cycles, "exclude graphs with directed cycles");
    cmd_census->add_flag("--all-classes", all_classes,
                         "report saturated and multi-constraint classes too");
    cmd_census->add_option("--family-mode", family_mode, "pa (Y_v = pa(v) only) or all")
        ->check(CLI::IsMember({"pa", "all"}))
        ->capture_default_str();
    cmd_census->add_option("--cap", census_opts.expansion_cap, "expansion cap")
        ->capture_default_str();
    cmd_census->add_option("--search-slots", census_opts.search_slots,
                           "vanishing-search fallback bound for non-HTC classes (0 = off)")
        ->capture_default_str();
    cmd_census->add_option("--checkpoint", census_opts.checkpoint,
                           "JSONL checkpoint file for resumable runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_derive) {
            MixedGraph g = load_graph(d_graph);
            IdentifyingFamily fam;
            if (!d_family.empty()) {
                fam = family_from_json(Json::parse(slurp(d_family)));
            } else {
                auto found = find_identifying_family(g);
                if (!found) {
                    std::cerr << "graph is not HTC-identifiable; no family found\n";
                    return 2;
                }
                fam = *found;
            }
            std::vector<DerivedConstraint> derived;
            if (!d_pair.empty())
                derived.push_back(derive_constraint(g, fam, parse_pair(d_pair)));
            else
                derived = derive_all(g, fam);
            for (const auto& d : derived) {
                if (format == "json")
                    std::cout << constraint_to_json(d.gc).dump() << "\n";
                else
                    std::cout << "pair {" << d.pair.first << "," << d.pair.second << "}\n"
                              << render_zigzag(d.gc);
            }
            return 0;
        }
        if (*cmd_verify) {
            MixedGraph g = load_graph(v_graph);
            GraphicalConstraint gc = load_constraint(v_constraint);
            BatteryReport rep = vanishing_battery(gc, g, v_trials, seed);
            Json out = battery_to_json(rep);
            if (!v_sigma.empty()) {
                CovarianceMatrix sigma = CovarianceMatrix::parse(slurp(v_sigma));
                out["sigma_satisfies"] = satisfies(gc, sigma);
            }
            std::cout << out.dump(2) << "\n";
            return rep.model_pass == rep.trials ? 0 : 1;
        }
        if (*cmd_transform) {
            GraphicalConstraint gc = load_constraint(t_constraint);
            auto emit = [&](const SimplifyResult& r) {
                Json factors = Json::array();
                for (const auto& f : r.factors) factors.push_back(constraint_to_json(f));
                Json out{{"core", constraint_to_json(r.core)},
                         {"factors", factors},
                         {"steps", r.steps},
                         {"fingerprint_verified", r.fingerprint_verified}};
                if (format == "json") {
                    std::cout << out.dump(2) << "\n";
                } else {
                    std::cout << "core:\n" << render_zigzag(r.core);
                    for (const auto& f : r.factors) std::cout << "factor:\n" << render_zigzag(f);
                }
                return r.fingerprint_verified;
            };
            bool ok = true;
            if (t_all_orders) {
                for (const auto& r : simplify_all_orders(gc)) ok = emit(r) && ok;
            } else {
                ok = emit(simplify(gc));
            }
            return ok ? 0 : 1;
        }
        if (*cmd_classify) {
            MixedGraph g = load_graph(c_graph);
            IdentifyingFamily fam;
            if (!c_family.empty()) {
                fam = family_from_json(Json::parse(slurp(c_family)));
            } else {
                auto found = find_identifying_family(g);
                if (!found) {
                    std::cerr << "graph is not HTC-identifiable; no family found\n";
                    return 2;
                }
                fam = *found;
            }
            Json out = Json::array();
            bool all_ok = true;
            for (const auto& d : derive_all(g, fam)) {
                Json entry{{"pair", Json::array({d.pair.first, d.pair.second})},
                           {"constraint", constraint_to_json(d.gc)}};
                PatternMatrix m = d.gc.build_matrix();
                if (m.dim() > c_cap) {
                    entry["verdict"] = "unknown";
                    entry["reason"] = "expansion cap exceeded";
                    out.push_back(entry);
                    continue;
                }
                Polynomial raw = det_expand(m, c_cap);
                PeelResult peel = peel_principal_minors(raw, g.nodes(), c_cap);
                Json peel_log = Json::array();
                for (const auto& [vars, mult] : peel.peeled)
                    peel_log.push_back(Json{{"minor", vars}, {"multiplicity", mult}});
                entry["peel"] = peel_log;
                entry["core"] = peel.core.canonical_sign().to_text();
                Polynomial core_ref = peel.core;
                if (!c_core.empty()) {
                    GraphicalConstraint ref_gc = load_constraint(c_core);
                    core_ref = peel_principal_minors(det_expand(ref_gc.build_matrix(), c_cap),
                                                     g.nodes(), c_cap)
                                   .core;
                }
                PdVerdict pd = pd_primary_certificate(d.gc, core_ref, g.nodes(), c_cap);
                entry["pd_primary"] = to_string(pd);
                entry["i_primary"] = to_string(i_primary_certificate(g, fam, d, c_cap));
                if (pd != PdVerdict::certified) all_ok = false;
                out.push_back(entry);
            }
            std::cout << out.dump(2) << "\n";
            return all_ok ? 0 : 1;
        }
        if (*cmd_search) {
            Polynomial target = Polynomial::parse(slurp(s_target));
            auto vars = split_csv(s_vars);
            auto found = match_target(target, vars, s_bounds,
                                      s_scalar ? MatchMode::up_to_scalar : MatchMode::exact);
            for (const auto& gc : found) {
                if (format == "json")
                    std::cout << constraint_to_json(gc).dump() << "\n";
                else
                    std::cout << render_zigzag(gc);
            }
            std::cerr << found.size() << " match(es) within bounds\n";
            return 0;
        }
        if (*cmd_census) {
            census_opts.edges_exact = edges_mode == "exact";
            census_opts.allow_bows = !no_bows;
            census_opts.allow_cycles = !no_cycles;
            census_opts.one_constraint_only = !all_classes;
            census_opts.family_mode = family_mode == "pa" ? CensusOptions::FamilyMode::pa_only
                                                          : CensusOptions::FamilyMode::enumerate_all;
            census_opts.seed = seed;
            census_opts.threads = threads;
            CensusReport rep = census(census_opts);
            if (format == "json")
                std::cout << report_to_json(rep).dump(2) << "\n";
            else
                std::cout << render_text_table(rep);
            return rep.invariants_ok ? 0 : 1;
        }
    } catch (const algcon::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
