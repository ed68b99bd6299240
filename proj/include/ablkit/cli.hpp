// cli.hpp
// Report builders behind the `ablkit` command-line tool, and the dispatcher
// itself so that tests can drive it in-process.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ablkit/counterfactual.hpp"
#include "ablkit/histories.hpp"
#include "ablkit/scenario.hpp"

namespace ablkit::cli {

enum ExitCode : int { ok = 0, usage_error = 1, domain_error = 2 };

struct AblRequest {
    std::string observable;
    // When set, also evaluate both reassembled totals for `branch` over this
    // observable of the scenario used as the set of final outcomes.
    std::optional<std::string> final_basis;
    std::size_t branch = 0;
    double tolerance = tol::cons;
};

struct ConsistencyRequest {
    std::string observable;
    bool coarse_grainings = false;
    ConsistencyOptions options;
};

struct SimulateRequest {
    std::optional<std::string> observable;  // none: no intermediate measurement
    std::uint64_t trials = 200000;
    std::uint64_t seed = 42;
    unsigned threads = 1;
    double sigmas = 4.0;
};

// Each builder returns the machine-readable report. Library errors propagate.
ordered_json abl_report(const Scenario& s, const AblRequest& req);
ordered_json consistency_report(const Scenario& s, const ConsistencyRequest& req);
ordered_json simulate_report(const Scenario& s, const SimulateRequest& req);
ordered_json counterexample_report(const CounterexampleSearch& params, bool survey);

// Scenario snippet that replays a counterexample: preselection a, the first
// final-basis vector as postselection, observables "C" and "final".
Scenario counterexample_scenario(const Counterexample& cx);

// Human-readable rendering of any report above.
std::string render_text(const ordered_json& report);

// Full command line (args[0] is the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ablkit::cli
