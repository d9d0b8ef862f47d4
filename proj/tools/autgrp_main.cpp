// Command-line workbench for automaton groups: parsing and validation,
// Moore and kneading diagrams, stable sets, fixed-point statistics, and
// limit verdicts.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "autgrp/automaton.hpp"
#include "autgrp/builtins.hpp"
#include "autgrp/errors.hpp"
#include "autgrp/fixstat.hpp"
#include "autgrp/imgbuild.hpp"
#include "autgrp/kneading.hpp"
#include "autgrp/permgeom.hpp"
#include "autgrp/verdict.hpp"
#include "autgrp/wreath.hpp"

using namespace autgrp;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitBudget = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DomainError("cannot write file: " + out_path);
    out << text;
}

Automaton load_automaton(const std::string& path) { return parse_automaton(slurp(path)); }

std::string rat_str(const BigRat& r) { return r.str(); }

struct GlobalOptions {
    Budgets budgets;
    int workers = 1;
};

void add_budget_flags(CLI::App& app, GlobalOptions& g) {
    app.add_option("--max-closure", g.budgets.max_restrictions,
                   "Cap on distinct restriction words per decision")
        ->envname("AUTGRP_MAX_CLOSURE");
    app.add_option("--max-depth", g.budgets.max_restriction_depth,
                   "Cap on restriction-closure exploration depth")
        ->envname("AUTGRP_MAX_DEPTH");
    app.add_option("--stable-cap", g.budgets.stable_set_cap,
                   "Cap on stable-set candidates")
        ->envname("AUTGRP_STABLE_CAP");
    app.add_option("--enum-budget", g.budgets.enumeration_budget,
                   "Largest group order enumerated exactly")
        ->envname("AUTGRP_ENUM_BUDGET");
    app.add_option("--level-budget", g.budgets.max_level_points,
                   "Largest materialized level size d^n")
        ->envname("AUTGRP_LEVEL_BUDGET");
    app.add_option("--workers", g.workers, "Worker threads for sampling")
        ->envname("AUTGRP_WORKERS");
}

ordered_json elements_json(const std::vector<Element>& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : v) arr.push_back(e.to_string());
    return arr;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for tree-automorphism groups defined by finite automata"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Configuration file (same keys as the flags)");
    app.option_defaults()->always_capture_default();

    GlobalOptions global;
    add_budget_flags(app, global);

    std::string file, expr, out_path, format = "text", mode_name = "auto";
    int depth = 4, level = 1;
    std::uint64_t samples = 0, seed = 0;
    bool reduced = false, use_kneading = false, allow_nontransitive = false, json_out = false;
    bool seed_given = false;

    auto* cmd_parse = app.add_subcommand("parse", "Parse and echo an automaton");
    cmd_parse->add_option("file", file)->required();
    cmd_parse->add_flag("--json", json_out, "Emit a JSON summary");

    auto* cmd_validate = app.add_subcommand("validate", "Validate an automaton");
    cmd_validate->add_option("file", file)->required();
    cmd_validate->add_flag("--kneading", use_kneading, "Also check the kneading conditions");

    auto* cmd_moore = app.add_subcommand("moore", "Moore diagram as DOT");
    cmd_moore->add_option("file", file)->required();
    cmd_moore->add_flag("--reduced", reduced, "Omit the identity state");
    cmd_moore->add_option("-o,--output", out_path);

    auto* cmd_kg = app.add_subcommand("kneading-graph", "Kneading graph as DOT");
    cmd_kg->add_option("file", file)->required();
    cmd_kg->add_option("-o,--output", out_path);

    auto* cmd_stable = app.add_subcommand("stable-set", "Stable elements and circuit elements");
    cmd_stable->add_option("file", file)->required();
    cmd_stable->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* cmd_n1 = app.add_subcommand("n1", "Circuit-element structure");
    cmd_n1->add_option("file", file)->required();

    auto* cmd_nucleus = app.add_subcommand("nucleus", "Nucleus of the generated group");
    cmd_nucleus->add_option("file", file)->required();
    cmd_nucleus->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* cmd_ends = app.add_subcommand("classify-ends", "Fixed ends of an element");
    cmd_ends->add_option("file", file)->required();
    cmd_ends->add_option("expr", expr)->required();

    auto* cmd_trans = app.add_subcommand("transitive", "Spherical transitivity of an element");
    cmd_trans->add_option("file", file)->required();
    cmd_trans->add_option("expr", expr)->required();
    cmd_trans->add_option("--depth", depth)->required();

    bool emit_cycle_dot = false;
    auto* cmd_treelike = app.add_subcommand("treelike", "Tree-likeness of the level action");
    cmd_treelike->add_option("file", file)->required();
    cmd_treelike->add_option("--level", level)->required();
    cmd_treelike->add_flag("--dot", emit_cycle_dot, "Emit the cycle graph as DOT instead");
    cmd_treelike->add_option("-o,--output", out_path);

    auto* cmd_img = app.add_subcommand("img", "Build a standard-action automaton");
    std::string portrait_path;
    int cheb_d = 0, power_d = 0;
    bool neg = false, want_basilica = false;
    auto* o_portrait = cmd_img->add_option("--portrait", portrait_path, "Portrait file");
    auto* o_cheb = cmd_img->add_option("--chebyshev", cheb_d, "Chebyshev portrait of this degree");
    cmd_img->add_flag("--neg", neg, "Negated variant (odd degrees)");
    auto* o_power = cmd_img->add_option("--power", power_d, "Power-map portrait of this degree");
    auto* o_bas = cmd_img->add_flag("--basilica", want_basilica, "Basilica portrait");
    o_portrait->excludes(o_cheb)->excludes(o_power)->excludes(o_bas);
    o_cheb->excludes(o_power)->excludes(o_bas);
    o_power->excludes(o_bas);
    cmd_img->add_option("-o,--output", out_path);

    auto* cmd_exc = app.add_subcommand("exceptional", "Exceptional-shape detection");
    cmd_exc->add_option("file", file)->required();

    auto* cmd_fstat = app.add_subcommand("fstat", "Fixed-point fractions per level");
    cmd_fstat->add_option("file", file)->required();
    cmd_fstat->add_option("--depth", depth)->required();
    cmd_fstat->add_option("--mode", mode_name)->check(CLI::IsMember({"exact", "sample", "auto"}));
    cmd_fstat->add_option("--samples", samples);
    cmd_fstat->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
    cmd_fstat->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));

    auto* cmd_fp = app.add_subcommand("fp-table", "Joint fixed-point count distribution");
    cmd_fp->add_option("file", file)->required();
    cmd_fp->add_option("--depth", depth)->required();
    cmd_fp->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));

    auto* cmd_mart = app.add_subcommand("martingale", "Exact conditional-mean verification");
    cmd_mart->add_option("file", file)->required();
    cmd_mart->add_option("--depth", depth)->required();
    cmd_mart->add_flag("--allow-nontransitive", allow_nontransitive,
                       "Run the arithmetic even without a transitive product");

    auto* cmd_df = app.add_subcommand("dihedral-f", "Exact limit fraction for involution pairs");
    cmd_df->add_option("file", file)->required();

    auto* cmd_verdict = app.add_subcommand("verdict", "Limiting-fraction verdict");
    cmd_verdict->add_option("file", file)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const Budgets& B = global.budgets;

        if (cmd_parse->parsed()) {
            Automaton a = load_automaton(file);
            if (json_out) {
                ordered_json j;
                j["alphabet"] = a.degree();
                j["states"] = ordered_json::array();
                for (int s = 0; s < a.state_count(); ++s) {
                    ordered_json st;
                    st["name"] = a.state_name(s);
                    st["perm"] = format_cycles(a.root_perm(s));
                    ordered_json rs = ordered_json::array();
                    for (int x = 0; x < a.degree(); ++x) {
                        int t = a.restriction(s, x);
                        rs.push_back(t == kIdentityState ? "1" : a.state_name(t));
                    }
                    st["restrictions"] = rs;
                    j["states"].push_back(st);
                }
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << to_dsl(a);
            }
            return kExitOk;
        }

        if (cmd_validate->parsed()) {
            Automaton a = load_automaton(file);
            std::cout << "parse: ok (" << a.state_count() << " states, alphabet "
                      << a.degree() << ")\n";
            if (use_kneading) {
                KneadingReport rep = validate_kneading(a);
                std::cout << "condition 1 (unique in-arrows):        "
                          << (rep.unique_in_arrows ? "pass" : "fail") << "\n";
                std::cout << "condition 2 (one restriction per cycle): "
                          << (rep.cycle_restrictions ? "pass" : "fail") << "\n";
                std::cout << "condition 3 (tree-like level action):  "
                          << (rep.tree_like ? "pass" : "fail") << "\n";
                std::cout << "condition 4 (single loop per component): "
                          << (rep.single_loop_components ? "pass" : "fail") << "\n";
                if (!rep.all()) return kExitDomain;
            }
            return kExitOk;
        }

        if (cmd_moore->parsed()) {
            emit(moore_dot(load_automaton(file), reduced), out_path);
            return kExitOk;
        }

        if (cmd_kg->parsed()) {
            Automaton a = load_automaton(file);
            emit(kneading_graph_dot(build_kneading_graph(a), a), out_path);
            return kExitOk;
        }

        if (cmd_stable->parsed() || cmd_nucleus->parsed()) {
            Automaton a = load_automaton(file);
            AutomatonGroup g(a, B);
            StableSets ss = stable_sets(g);
            if (format == "json") {
                ordered_json j;
                j["n0"] = elements_json(ss.n0);
                j["n1"] = elements_json(ss.n1);
                j["nucleus"] = elements_json(ss.nucleus);
                std::cout << j.dump(2) << "\n";
            } else if (cmd_nucleus->parsed()) {
                std::cout << "nucleus (" << ss.nucleus.size() << "):";
                for (const auto& e : ss.nucleus) std::cout << " " << e.to_string();
                std::cout << "\n";
            } else {
                std::cout << "N0 (" << ss.n0.size() << "):";
                for (const auto& e : ss.n0) std::cout << " " << e.to_string();
                std::cout << "\nN1 (" << ss.n1.size() << "):";
                for (const auto& e : ss.n1) std::cout << " " << e.to_string();
                std::cout << "\n";
            }
            return kExitOk;
        }

        if (cmd_n1->parsed()) {
            Automaton a = load_automaton(file);
            AutomatonGroup g(a, B);
            N1Structure s = n1_structure(g);
            std::cout << "cycles are loops: " << (s.all_cycles_are_loops ? "yes" : "no")
                      << "; components have single loops: "
                      << (s.components_single_loop ? "yes" : "no") << "\n";
            for (const auto& e : s.entries) {
                std::cout << e.element.to_string();
                if (e.decomposed) {
                    std::cout << " = h^-1 * " << a.state_name(e.loop_state) << "^"
                              << e.exponent << " * h with h = " << e.conjugator.to_string();
                } else {
                    std::cout << " (no decomposition found: internal inconsistency)";
                }
                std::cout << "\n";
            }
            if (s.entries.empty()) std::cout << "N1 is trivial; nothing to decompose\n";
            return s.all_decomposed() ? kExitOk : kExitDomain;
        }

        if (cmd_ends->parsed()) {
            Automaton a = load_automaton(file);
            AutomatonGroup g(a, B);
            Element e = g.parse_element(expr);
            FixedEnds fe = e.classify_fixed_ends();
            switch (fe.kind) {
                case FixedEnds::Zero:
                    std::cout << "fixes no ends\n";
                    break;
                case FixedEnds::Infinite:
                    std::cout << "fixes infinitely many ends\n";
                    break;
                case FixedEnds::Finite: {
                    Alphabet al(a.degree());
                    std::cout << "fixes exactly " << fe.count << " end(s); witness: "
                              << format_word(fe.witness_preperiod, al) << "("
                              << format_word(fe.witness_period, al) << ")*\n";
                    break;
                }
            }
            return kExitOk;
        }

        if (cmd_trans->parsed()) {
            Automaton a = load_automaton(file);
            AutomatonGroup g(a, B);
            auto res = g.parse_element(expr).spherically_transitive(depth);
            if (res.transitive)
                std::cout << "spherically transitive through level " << depth << "\n";
            else
                std::cout << "not transitive: first failing level " << res.first_failing_level
                          << "\n";
            return kExitOk;
        }

        if (cmd_treelike->parsed()) {
            Automaton a = load_automaton(file);
            if (emit_cycle_dot) {
                AutomatonGroup g(a, B);
                std::uint64_t points = 1;
                for (int i = 0; i < level; ++i) points *= std::uint64_t(a.degree());
                PermMultiset t{int(points), {}};
                for (int s = 0; s < a.state_count(); ++s)
                    t.members.push_back(g.generator(s).level_permutation(level));
                emit(cycle_graph_dot(t), out_path);
                return kExitOk;
            }
            bool ok = treelike_at_level(a, level);
            std::cout << "level " << level << ": " << (ok ? "tree-like" : "not tree-like")
                      << "\n";
            return kExitOk;
        }

        if (cmd_img->parsed()) {
            Portrait p;
            if (!portrait_path.empty())
                p = parse_portrait(slurp(portrait_path));
            else if (cheb_d > 0)
                p = chebyshev_portrait(cheb_d, neg);
            else if (power_d > 0)
                p = power_portrait(power_d);
            else if (want_basilica)
                p = basilica_portrait();
            else
                throw DomainError("img needs one of --portrait, --chebyshev, --power, --basilica");
            auto diags = validate_portrait(p);
            if (!diags.empty()) {
                for (const auto& d : diags) std::cerr << "portrait: " << d << "\n";
                return kExitDomain;
            }
            emit(to_dsl(portrait_automaton(p)), out_path);
            return kExitOk;
        }

        if (cmd_exc->parsed()) {
            Automaton a = load_automaton(file);
            ExceptionalReport rep = detect_exceptional_shape(a);
            switch (rep.verdict) {
                case ExceptionalReport::NotExceptionalShape:
                    std::cout << "not an exceptional shape\n";
                    break;
                case ExceptionalReport::ChebyshevEven:
                    std::cout << "chebyshev-even shape";
                    break;
                case ExceptionalReport::ChebyshevOdd:
                    std::cout << "chebyshev-odd shape";
                    break;
                case ExceptionalReport::SinglePoint:
                    std::cout << "single-point shape (limit fraction unknown)";
                    break;
            }
            if (rep.verdict != ExceptionalReport::NotExceptionalShape) {
                std::cout << " [states:";
                for (int s : rep.shape_states) std::cout << " " << a.state_name(s);
                std::cout << "]\n";
            }
            return kExitOk;
        }

        if (cmd_fstat->parsed()) {
            Automaton a = load_automaton(file);
            FStatOptions opt;
            opt.budgets = B;
            opt.workers = global.workers;
            opt.samples = samples;
            opt.seed = seed;
            opt.mode = mode_name == "exact"    ? FStatMode::Exact
                       : mode_name == "sample" ? FStatMode::Sample
                                               : FStatMode::Auto;
            if (opt.mode != FStatMode::Exact && !seed_given)
                throw DomainError("sampling requires --seed for reproducibility");
            auto rows = fstat(a, depth, opt);
            if (format == "json") {
                ordered_json arr = ordered_json::array();
                for (const auto& r : rows) {
                    ordered_json j;
                    j["n"] = r.n;
                    j["order"] = r.order.str();
                    j["mode"] = r.exact ? "exact" : "sample";
                    if (r.exact) {
                        j["f_exact"] = rat_str(r.f_exact);
                    } else {
                        j["f_est"] = r.f_estimate;
                        j["ci_low"] = r.ci_low;
                        j["ci_high"] = r.ci_high;
                    }
                    arr.push_back(j);
                }
                std::cout << arr.dump(2) << "\n";
            } else if (format == "csv") {
                std::cout << "n,order,mode,f_exact,f_est,ci_low,ci_high\n";
                for (const auto& r : rows) {
                    std::cout << r.n << "," << r.order.str() << ","
                              << (r.exact ? "exact" : "sample") << ",";
                    if (r.exact)
                        std::cout << rat_str(r.f_exact) << ",,,";
                    else
                        std::cout << "," << r.f_estimate << "," << r.ci_low << "," << r.ci_high;
                    std::cout << "\n";
                }
            } else {
                for (const auto& r : rows) {
                    std::cout << "n=" << r.n << "  |G_n|=" << r.order.str() << "  ";
                    if (r.exact)
                        std::cout << "F_n = " << rat_str(r.f_exact);
                    else
                        std::cout << "F_n ~ " << r.f_estimate << "  [" << r.ci_low << ", "
                                  << r.ci_high << "] (" << r.samples << " samples)";
                    std::cout << "\n";
                }
            }
            return kExitOk;
        }

        if (cmd_fp->parsed()) {
            Automaton a = load_automaton(file);
            FPTable t = fp_table(a, depth, B);
            if (format == "json") {
                ordered_json j;
                j["n"] = t.n;
                j["order"] = t.order.str();
                ordered_json arr = ordered_json::array();
                for (const auto& [ys, mult] : t.rows) {
                    ordered_json row;
                    row["y"] = ys;
                    row["count"] = mult.str();
                    arr.push_back(row);
                }
                j["rows"] = arr;
                std::cout << j.dump(2) << "\n";
            } else if (format == "csv") {
                std::cout << "count";
                for (int i = 1; i <= t.n; ++i) std::cout << ",y" << i;
                std::cout << "\n";
                for (const auto& [ys, mult] : t.rows) {
                    std::cout << mult.str();
                    for (auto y : ys) std::cout << "," << y;
                    std::cout << "\n";
                }
            } else {
                std::cout << "|G_" << t.n << "| = " << t.order.str() << "\n";
                for (const auto& [ys, mult] : t.rows) {
                    std::cout << "(";
                    for (std::size_t i = 0; i < ys.size(); ++i)
                        std::cout << (i ? ", " : "") << ys[i];
                    std::cout << ") x " << mult.str() << "\n";
                }
            }
            return kExitOk;
        }

        if (cmd_mart->parsed()) {
            Automaton a = load_automaton(file);
            MartingaleReport rep = martingale_check(a, depth, !allow_nontransitive, B);
            if (!rep.transitive)
                std::cout << "state product is NOT spherically transitive (first failure at level "
                          << rep.first_failing_level << "); the equality is not expected\n";
            for (const auto& row : rep.rows) {
                std::cout << "n=" << row.n << "  history=(";
                for (std::size_t i = 0; i < row.history.size(); ++i)
                    std::cout << (i ? "," : "") << row.history[i];
                std::cout << ")  classes=" << row.class_size.str()
                          << "  E[Y_n|history] = " << rat_str(row.mean)
                          << (row.matches ? "  == previous" : "  != previous") << "\n";
            }
            std::cout << (rep.all_match() ? "all conditional means match\n"
                                          : "violations present\n");
            return kExitOk;
        }

        if (cmd_df->parsed()) {
            std::cout << rat_str(dihedral_fraction(load_automaton(file), 12, B)) << "\n";
            return kExitOk;
        }

        if (cmd_verdict->parsed()) {
            Verdict v = report_verdict(load_automaton(file), B);
            std::cout << verdict_text(v) << "\n";
            return kExitOk;
        }

        throw DomainError("no command dispatched");
    } catch (const BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ParseError& e) {
        std::cerr << "parse: " << e.what() << "\n";
        return kExitDomain;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
