#include "ablkit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ablkit/abl.hpp"
#include "ablkit/errors.hpp"
#include "ablkit/simulator.hpp"

namespace ablkit::cli {

namespace {

const char* verdict(bool holds) { return holds ? "holds" : "fails"; }

ordered_json tolerances(double cons) {
    ordered_json t;
    t["alg"] = tol::alg;
    t["norm"] = tol::norm;
    t["div"] = tol::div;
    t["cons"] = cons;
    return t;
}

ordered_json eigenvalues(const ObservableDecomposition& obs) {
    auto out = ordered_json::array();
    for (const auto& b : obs.branches()) out.push_back(b.eigenvalue);
    return out;
}

ordered_json mixing_json(const MixingReport& m) {
    ordered_json j;
    j["born_total"] = m.born_total;
    j["ss_total"] = m.ss_total;
    j["vaidman_total"] = m.vaidman_total;
    j["ss_gap"] = m.ss_gap;
    return j;
}

}  // namespace

// --------------------------------------------------------------- reports

ordered_json abl_report(const Scenario& s, const AblRequest& req) {
    const auto& obs = s.observable(req.observable);
    const PrePostContext ctx = s.context();
    const AblDistribution dist = abl_distribution(ctx, obs);

    ordered_json r;
    r["command"] = "abl";
    r["scenario"] = s.name;
    r["observable"] = req.observable;
    r["tolerances"] = tolerances(req.tolerance);

    ordered_json res;
    res["eigenvalues"] = eigenvalues(obs);
    res["abl"] = dist.probabilities;
    res["joint"] = dist.joint;
    res["denominator"] = dist.denominator;
    res["born"] = born_distribution(ctx.pre(), obs);
    res["undisturbed_final_probability"] = ctx.undisturbed_final_probability();

    ordered_json verdicts = ordered_json::object();
    if (req.final_basis) {
        const auto& fb = s.observable(*req.final_basis);
        const MixingReport m = mixing_report(ctx.pre(), fb, obs, req.branch);
        ordered_json mj = mixing_json(m);
        mj["final_basis"] = *req.final_basis;
        mj["branch"] = req.branch;
        res["mixing"] = std::move(mj);
        verdicts["sharp_shanks_identity"] = verdict(m.ss_gap <= req.tolerance);
        verdicts["vaidman_identity"] = verdict(std::abs(m.vaidman_total - m.born_total) <= req.tolerance);
    }
    r["results"] = std::move(res);
    r["verdicts"] = std::move(verdicts);
    return r;
}

ordered_json consistency_report(const Scenario& s, const ConsistencyRequest& req) {
    const auto& obs = s.observable(req.observable);
    const PrePostContext ctx = s.context();
    const double tolerance = req.options.tolerance;

    auto evaluate = [&](const ObservableDecomposition& d, ordered_json& results, ordered_json& verdicts) {
        const HistoryFamily fam(ctx, d);
        const ConsistencyReport rep = is_consistent(fam, req.options);
        const FinalProbabilityCheck chk = bcac_check(fam, tolerance);
        auto matrix = ordered_json::array();
        for (std::size_t i = 0; i < rep.size; ++i) {
            auto row = ordered_json::array();
            for (std::size_t j = 0; j < rep.size; ++j) row.push_back(complex_to_json(rep.at(i, j)));
            matrix.push_back(std::move(row));
        }
        results["decoherence"] = std::move(matrix);
        results["max_violation"] = rep.max_violation;
        results["bcac"] = {{"lhs", chk.lhs}, {"rhs", chk.rhs}};
        verdicts["consistency"] = rep.consistent ? "consistent" : "inconsistent";
        verdicts["bcac"] = verdict(chk.holds);
    };

    ordered_json r;
    r["command"] = "consistency";
    r["scenario"] = s.name;
    r["observable"] = req.observable;
    r["criterion"] = req.options.criterion == ConsistencyCriterion::medium ? "medium" : "weak";
    r["tolerances"] = tolerances(tolerance);
    ordered_json results, verdicts;
    evaluate(obs, results, verdicts);
    r["results"] = std::move(results);
    r["verdicts"] = std::move(verdicts);

    if (req.coarse_grainings) {
        const auto partitions = set_partitions(obs.size());
        const auto grains = enumerate_coarse_grainings(obs);
        auto list = ordered_json::array();
        for (std::size_t k = 0; k < grains.size(); ++k) {
            ordered_json entry;
            auto blocks = ordered_json::array();
            const std::size_t nblocks = grains[k].size();
            for (std::size_t b = 0; b < nblocks; ++b) {
                auto members = ordered_json::array();
                for (std::size_t m = 0; m < partitions[k].size(); ++m) {
                    if (partitions[k][m] == b) members.push_back(m);
                }
                blocks.push_back(std::move(members));
            }
            entry["blocks"] = std::move(blocks);
            auto matches = ordered_json::array();
            for (const auto& o : s.observables) {
                if (o.decomposition.same_projectors(grains[k])) matches.push_back(o.name);
            }
            entry["matches"] = std::move(matches);
            ordered_json res, ver;
            evaluate(grains[k], res, ver);
            entry["max_violation"] = res["max_violation"];
            entry["bcac"] = res["bcac"];
            entry["verdicts"] = std::move(ver);
            list.push_back(std::move(entry));
        }
        r["coarse_grainings"] = std::move(list);
    }
    return r;
}

ordered_json simulate_report(const Scenario& s, const SimulateRequest& req) {
    const PrePostContext ctx = s.context();
    std::optional<ObservableDecomposition> obs;
    if (req.observable) obs = s.observable(*req.observable);

    ordered_json r;
    r["command"] = "simulate";
    r["scenario"] = s.name;
    r["observable"] = req.observable ? ordered_json(*req.observable) : ordered_json(nullptr);
    r["trials"] = req.trials;
    r["seed"] = req.seed;
    r["threads"] = req.threads;
    r["sigmas"] = req.sigmas;

    ordered_json res, verdicts;
    const auto fin = estimate_final_probability(ctx, obs, req.trials, req.seed, req.threads);
    const double undisturbed = ctx.undisturbed_final_probability();
    const double disturbed = obs ? disturbed_final_probability(ctx, *obs) : undisturbed;
    const double fin_z = z_score(fin.fraction, disturbed, fin.std_error);
    res["final_probability"] = {{"estimate", fin.fraction},
                                {"std_error", fin.std_error},
                                {"postselected_count", fin.postselected_count},
                                {"exact", disturbed},
                                {"undisturbed_exact", undisturbed},
                                {"z", fin_z}};
    verdicts["final_probability_agreement"] = verdict(std::abs(fin_z) <= req.sigmas);

    if (obs) {
        const EnsembleStats st = estimate_abl(ctx, *obs, req.trials, req.seed, req.threads);
        const auto exact = abl_distribution(ctx, *obs).probabilities;
        const auto born = born_distribution(ctx.pre(), *obs);
        auto z = ordered_json::array();
        auto differs = ordered_json::array();
        bool all_ok = true;
        for (std::size_t k = 0; k < obs->size(); ++k) {
            const double zk = z_score(st.conditional_freq[k], exact[k], st.std_error[k]);
            z.push_back(zk);
            all_ok = all_ok && std::abs(zk) <= req.sigmas;
            differs.push_back(std::abs(z_score(st.conditional_freq[k], born[k], st.std_error[k])) > req.sigmas);
        }
        res["eigenvalues"] = eigenvalues(*obs);
        res["postselected_count"] = st.postselected_count;
        res["counts"] = st.counts;
        res["conditional_freq"] = st.conditional_freq;
        res["std_error"] = st.std_error;
        res["abl_exact"] = exact;
        res["born"] = born;
        res["z_scores"] = std::move(z);
        verdicts["abl_agreement"] = verdict(all_ok);
        verdicts["differs_from_born"] = std::move(differs);
    }
    r["results"] = std::move(res);
    r["verdicts"] = std::move(verdicts);
    return r;
}

Scenario counterexample_scenario(const Counterexample& cx) {
    std::vector<NamedObservable> obs;
    obs.push_back({"C", cx.observable});
    obs.push_back({"final", cx.final_basis});
    return {"counterexample", cx.a, ket_of(cx.final_basis[0].projector), std::move(obs)};
}

ordered_json counterexample_report(const CounterexampleSearch& params, bool survey) {
    ordered_json r;
    r["command"] = "counterexample";
    r["dim"] = params.dim;
    r["seed"] = params.seed;
    r["gap_min"] = params.gap_min;
    r["max_tries"] = params.max_tries;
    if (survey) {
        const HitRate h = counterexample_hit_rate(params);
        r["hit_rate"] = {{"tries", h.tries}, {"hits", h.hits}, {"rate", h.rate()}};
    }
    try {
        const Counterexample cx = find_counterexample(params);
        r["status"] = "found";
        r["attempt"] = cx.attempt;
        r["branch"] = cx.branch;
        r["results"] = mixing_json(cx.report);
        r["verdicts"] = {
            {"sharp_shanks_identity", verdict(cx.report.ss_gap <= tol::cons)},
            {"vaidman_identity", verdict(std::abs(cx.report.vaidman_total - cx.report.born_total) <= tol::cons)}};
        r["scenario"] = scenario_to_json(counterexample_scenario(cx));
        r["replay"] = "ablkit abl --scenario FILE --observable C --final-basis final --branch " +
                      std::to_string(cx.branch);
    } catch (const NotFound& e) {
        r["status"] = "not_found";
        r["message"] = e.what();
    }
    return r;
}

// -------------------------------------------------------------- rendering

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string num(const ordered_json& j) {
    if (j.is_null()) return "n/a";
    if (j.is_number_float()) return num(j.get<double>());
    return j.dump();
}

std::string complex_text(const ordered_json& z) {
    const double re = z[0].get<double>(), im = z[1].get<double>();
    std::string s = num(re);
    if (im != 0.0) s += (im < 0 ? " - " : " + ") + num(std::abs(im)) + "i";
    return s;
}

void render_abl(const ordered_json& r, std::ostream& o) {
    const auto& res = r["results"];
    o << "ABL distribution for observable '" << r["observable"].get<std::string>() << "' in scenario '"
      << r["scenario"].get<std::string>() << "'\n";
    o << "  branch  eigenvalue      ABL P(c|a,b)    joint Tr(PbPcPaPc)  Born |<c|a>|^2\n";
    for (std::size_t k = 0; k < res["abl"].size(); ++k) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-6zu  %-14s  %-14s  %-18s  %s\n", k,
                      num(res["eigenvalues"][k]).c_str(), num(res["abl"][k]).c_str(),
                      num(res["joint"][k]).c_str(), num(res["born"][k]).c_str());
        o << line;
    }
    o << "  denominator (P(b|a) with measurement): " << num(res["denominator"]) << "\n";
    o << "  |<b|a>|^2 (no measurement):            " << num(res["undisturbed_final_probability"]) << "\n";
    if (res.contains("mixing")) {
        const auto& m = res["mixing"];
        o << "Reassembled total for branch " << num(m["branch"]) << " over final basis '"
          << m["final_basis"].get<std::string>() << "'\n";
        o << "  Born total:                    " << num(m["born_total"]) << "\n";
        o << "  undisturbed weights (ss):      " << num(m["ss_total"]) << "  ["
          << r["verdicts"]["sharp_shanks_identity"].get<std::string>() << "]\n";
        o << "  disturbed weights (vaidman):   " << num(m["vaidman_total"]) << "  ["
          << r["verdicts"]["vaidman_identity"].get<std::string>() << "]\n";
        o << "  gap |born - ss|:               " << num(m["ss_gap"]) << "\n";
    }
    o << "tolerance: " << num(r["tolerances"]["cons"]) << "\n";
}

void render_consistency(const ordered_json& r, std::ostream& o) {
    const auto& res = r["results"];
    o << "History family (P_a, {P_j of '" << r["observable"].get<std::string>() << "'}, P_b) in scenario '"
      << r["scenario"].get<std::string>() << "'\n";
    o << "Decoherence functional D(i,j) = Tr(P_b P_i P_a P_j):\n";
    for (const auto& row : res["decoherence"]) {
        o << " ";
        for (const auto& z : row) o << "  " << complex_text(z);
        o << "\n";
    }
    o << "max off-diagonal violation (" << r["criterion"].get<std::string>()
      << "): " << num(res["max_violation"]) << "\n";
    o << "verdict: " << r["verdicts"]["consistency"].get<std::string>() << "\n";
    o << "|<b|a>|^2 = " << num(res["bcac"]["lhs"]) << ", sum_j Tr(P_b P_j P_a P_j) = " << num(res["bcac"]["rhs"])
      << "  [" << r["verdicts"]["bcac"].get<std::string>() << "]\n";
    if (r.contains("coarse_grainings")) {
        o << "Coarse-grainings (" << r["coarse_grainings"].size() << "):\n";
        for (const auto& g : r["coarse_grainings"]) {
            std::string blocks;
            for (const auto& b : g["blocks"]) {
                blocks += "{";
                for (std::size_t k = 0; k < b.size(); ++k) blocks += (k ? "," : "") + b[k].dump();
                blocks += "}";
            }
            o << "  " << blocks << "  " << g["verdicts"]["consistency"].get<std::string>()
              << "  max_violation=" << num(g["max_violation"]) << "  bcac "
              << g["verdicts"]["bcac"].get<std::string>();
            if (!g["matches"].empty()) {
                o << "  =";
                for (const auto& m : g["matches"]) o << " " << m.get<std::string>();
            }
            o << "\n";
        }
    }
    o << "tolerance: " << num(r["tolerances"]["cons"]) << "\n";
}

void render_simulate(const ordered_json& r, std::ostream& o) {
    const auto& res = r["results"];
    o << "Simulated " << num(r["trials"]) << " trials of scenario '" << r["scenario"].get<std::string>()
      << "' (seed " << num(r["seed"]) << ", " << num(r["threads"]) << " thread(s))\n";
    const auto& f = res["final_probability"];
    o << "  postselection rate: " << num(f["estimate"]) << " +/- " << num(f["std_error"]) << "  exact "
      << num(f["exact"]) << "  z=" << num(f["z"]) << "  ["
      << r["verdicts"]["final_probability_agreement"].get<std::string>() << "]\n";
    if (!r["observable"].is_null()) {
        o << "  without measurement |<b|a>|^2 = " << num(f["undisturbed_exact"]) << "\n";
        o << "  postselected runs: " << num(res["postselected_count"]) << "\n";
        o << "  branch  freq            stderr          ABL exact       z         Born\n";
        for (std::size_t k = 0; k < res["conditional_freq"].size(); ++k) {
            char line[200];
            std::snprintf(line, sizeof line, "  %-6zu  %-14s  %-14s  %-14s  %-8s  %s%s\n", k,
                          num(res["conditional_freq"][k]).c_str(), num(res["std_error"][k]).c_str(),
                          num(res["abl_exact"][k]).c_str(), num(res["z_scores"][k]).c_str(),
                          num(res["born"][k]).c_str(),
                          r["verdicts"]["differs_from_born"][k].get<bool>() ? "  (differs from Born)" : "");
            o << line;
        }
        o << "  agreement with ABL within " << num(r["sigmas"]) << " sigma: "
          << r["verdicts"]["abl_agreement"].get<std::string>() << "\n";
    }
}

void render_counterexample(const ordered_json& r, std::ostream& o) {
    o << "Counterexample search: dim " << num(r["dim"]) << ", seed " << num(r["seed"]) << ", gap > "
      << num(r["gap_min"]) << ", up to " << num(r["max_tries"]) << " tries\n";
    if (r.contains("hit_rate")) {
        o << "  hit rate: " << num(r["hit_rate"]["hits"]) << "/" << num(r["hit_rate"]["tries"]) << " = "
          << num(r["hit_rate"]["rate"]) << "\n";
    }
    if (r["status"] != "found") {
        o << "  not found: " << r["message"].get<std::string>() << "\n";
        return;
    }
    const auto& m = r["results"];
    o << "  found at try " << num(r["attempt"]) << ", branch " << num(r["branch"]) << "\n";
    o << "  Born total:                  " << num(m["born_total"]) << "\n";
    o << "  undisturbed weights (ss):    " << num(m["ss_total"]) << "\n";
    o << "  disturbed weights (vaidman): " << num(m["vaidman_total"]) << "\n";
    o << "  gap:                         " << num(m["ss_gap"]) << "\n";
    o << "Scenario (save to FILE and replay with `" << r["replay"].get<std::string>() << "`):\n";
    o << r["scenario"].dump(2) << "\n";
}

}  // namespace

std::string render_text(const ordered_json& report) {
    std::ostringstream o;
    const std::string cmd = report.value("command", "");
    if (cmd == "abl") render_abl(report, o);
    else if (cmd == "consistency") render_consistency(report, o);
    else if (cmd == "simulate") render_simulate(report, o);
    else if (cmd == "counterexample") render_counterexample(report, o);
    else o << report.dump(2) << "\n";
    return o.str();
}

// ------------------------------------------------------------ dispatcher

namespace {

struct Source {
    std::string scenario_path;
    std::string builtin;

    void add_to(CLI::App* sub) {
        auto* a = sub->add_option("--scenario", scenario_path, "Scenario file (JSON)");
        auto* b = sub->add_option("--builtin", builtin, "Built-in scenario name");
        a->excludes(b);
        b->excludes(a);
    }

    Scenario load() const {
        if (!scenario_path.empty()) return load_scenario(scenario_path);
        if (builtin.empty()) throw InvalidArgument("one of --scenario or --builtin is required");
        if (auto s = builtin_scenario(builtin)) return *std::move(s);
        std::string names;
        for (const auto& n : builtin_names()) names += (names.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown built-in scenario '" + builtin + "' (available: " + names + ")");
    }
};

std::string default_observable(const Scenario& s, const std::string& requested) {
    if (!requested.empty()) return requested;
    if (s.observables.size() == 1) return s.observables.front().name;
    throw InvalidArgument("--observable is required (scenario has " + std::to_string(s.observables.size()) +
                          " observables)");
}

void emit(const ordered_json& report, bool json, std::ostream& out) {
    if (json) out << report.dump(2) << "\n";
    else out << render_text(report);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pre- and postselected measurement probabilities, history consistency and simulation"};
    app.name(args.empty() ? "ablkit" : args.front());
    app.require_subcommand(1);

    bool json = false;
    double tolerance = tol::cons;

    // abl
    Source abl_src;
    std::string abl_obs, abl_final;
    std::size_t abl_branch = 0;
    auto* abl = app.add_subcommand("abl", "ABL distribution of an intermediate observable");
    abl_src.add_to(abl);
    abl->add_option("--observable", abl_obs, "Observable name");
    abl->add_option("--final-basis", abl_final, "Observable used as the set of final outcomes");
    abl->add_option("--branch", abl_branch, "Branch index for --final-basis totals");
    abl->add_option("--tolerance", tolerance, "Verdict tolerance")->check(CLI::PositiveNumber);
    abl->add_flag("--json", json, "Machine-readable output");

    // consistency
    Source con_src;
    std::string con_obs;
    bool coarse = false, weak = false;
    auto* con = app.add_subcommand("consistency", "Decoherence functional and consistency of (P_a, {P_j}, P_b)");
    con_src.add_to(con);
    con->add_option("--observable", con_obs, "Observable name");
    con->add_flag("--coarse-grainings", coarse, "Also evaluate every coarse-graining of the observable");
    con->add_flag("--weak", weak, "Weak consistency (real parts only)");
    con->add_option("--tolerance", tolerance, "Consistency tolerance")->check(CLI::PositiveNumber);
    con->add_flag("--json", json, "Machine-readable output");

    // simulate
    Source sim_src;
    std::string sim_obs;
    SimulateRequest sim_req;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo of prepare / measure / postselect");
    sim_src.add_to(sim);
    sim->add_option("--observable", sim_obs, "Intermediate observable (omit or 'none' for no measurement)");
    sim->add_option("--trials", sim_req.trials, "Number of trials")->check(CLI::Range(std::uint64_t{1}, ~std::uint64_t{0}));
    sim->add_option("--seed", sim_req.seed, "Seed");
    sim->add_option("--threads", sim_req.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    sim->add_option("--sigmas", sim_req.sigmas, "Agreement threshold in standard errors")->check(CLI::PositiveNumber);
    sim->add_flag("--json", json, "Machine-readable output");

    // counterexample
    CounterexampleSearch search;
    search.dim = 2;
    bool survey = false;
    auto* cx = app.add_subcommand("counterexample", "Search for inputs where the undisturbed reassembly fails");
    cx->add_option("--dim", search.dim, "Hilbert space dimension")->check(CLI::Range(std::size_t{2}, std::size_t{6}));
    cx->add_option("--seed", search.seed, "Seed");
    cx->add_option("--gap-min", search.gap_min, "Required gap")->check(CLI::PositiveNumber);
    cx->add_option("--max-tries", search.max_tries, "Maximum tries")->check(CLI::Range(std::uint64_t{1}, ~std::uint64_t{0}));
    cx->add_option("--threads", search.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    cx->add_flag("--survey", survey, "Also count hits over all tries");
    cx->add_flag("--json", json, "Machine-readable output");

    // scenario validate | emit | list
    auto* scen = app.add_subcommand("scenario", "Scenario file utilities");
    scen->require_subcommand(1);
    Source val_src, emit_src;
    auto* validate = scen->add_subcommand("validate", "Parse and validate a scenario");
    val_src.add_to(validate);
    auto* emit_cmd = scen->add_subcommand("emit", "Print a scenario in canonical form");
    emit_src.add_to(emit_cmd);
    auto* list_cmd = scen->add_subcommand("list", "List built-in scenarios");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (abl->parsed()) {
            const Scenario s = abl_src.load();
            AblRequest req{default_observable(s, abl_obs), std::nullopt, abl_branch, tolerance};
            if (!abl_final.empty()) req.final_basis = abl_final;
            emit(abl_report(s, req), json, out);
        } else if (con->parsed()) {
            const Scenario s = con_src.load();
            ConsistencyRequest req{default_observable(s, con_obs), coarse,
                                   {weak ? ConsistencyCriterion::weak : ConsistencyCriterion::medium, tolerance}};
            emit(consistency_report(s, req), json, out);
        } else if (sim->parsed()) {
            const Scenario s = sim_src.load();
            if (!sim_obs.empty() && sim_obs != "none") sim_req.observable = sim_obs;
            emit(simulate_report(s, sim_req), json, out);
        } else if (cx->parsed()) {
            const ordered_json r = counterexample_report(search, survey);
            emit(r, json, out);
            if (r["status"] != "found") return domain_error;
        } else if (validate->parsed()) {
            const Scenario s = val_src.load();
            out << "valid: dimension " << s.dim() << ", " << s.observables.size() << " observable(s)";
            for (const auto& o : s.observables) out << " " << o.name;
            out << "\n";
        } else if (emit_cmd->parsed()) {
            out << emit_scenario(emit_src.load());
        } else if (list_cmd->parsed()) {
            for (const auto& n : builtin_names()) out << n << "\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return e.error_class() == ErrorClass::domain ? domain_error : usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
    return ok;
}

}  // namespace ablkit::cli
