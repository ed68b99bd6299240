#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ablkit/cli.hpp"

using namespace ablkit;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "ablkit");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

ordered_json call_json(std::vector<std::string> args) {
    args.push_back("--json");
    const Result r = call(std::move(args));
    REQUIRE(r.code == 0);
    return ordered_json::parse(r.out);
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("abl on the three-box scenario") {
    const auto c = call_json({"abl", "--builtin", "three-box", "--observable", "C"});
    CHECK(c["command"] == "abl");
    CHECK(std::abs(c["results"]["abl"][0].get<double>() - 1.0 / 3.0) <= tol::alg);
    CHECK(std::abs(c["results"]["born"][0].get<double>() - 1.0 / 3.0) <= tol::alg);
    CHECK(c["tolerances"]["cons"].get<double>() == tol::cons);

    const auto cp = call_json({"abl", "--builtin", "three-box", "--observable", "Cprime"});
    CHECK(std::abs(cp["results"]["abl"][0].get<double>() - 1.0) <= tol::alg);
    const auto cpp = call_json({"abl", "--builtin", "three-box", "--observable", "Cdoubleprime"});
    CHECK(std::abs(cpp["results"]["abl"][1].get<double>() - 1.0) <= tol::alg);

    const Result text = call({"abl", "--builtin", "three-box", "--observable", "C"});
    CHECK(text.code == 0);
    CHECK(text.out.find("0.333333333333") != std::string::npos);
}

TEST_CASE("abl totals over a final basis") {
    const auto r = call_json({"abl", "--builtin", "spin-pi3", "--observable", "n", "--final-basis", "X"});
    CHECK(std::abs(r["results"]["mixing"]["ss_total"].get<double>() - 15.0 / 26.0) <= tol::alg);
    CHECK(r["verdicts"]["sharp_shanks_identity"] == "fails");
    CHECK(r["verdicts"]["vaidman_identity"] == "holds");
    CHECK(call({"abl", "--builtin", "spin-pi3", "--observable", "n", "--final-basis", "X", "--branch", "5"}).code ==
          1);
}

TEST_CASE("domain and usage errors map to exit codes") {
    const auto path = temp_file("ablkit_orth.json", R"({
      "dim": 2, "preselection": [1, 0], "postselection": [0, 1],
      "observables": {"A": [{"eigenvalue": 1, "span": [[1, 0]]}, {"eigenvalue": 2, "span": [[0, 1]]}]}
    })");
    const Result orth = call({"abl", "--scenario", path.string(), "--observable", "A"});
    CHECK(orth.code == 2);
    CHECK(orth.err.find("ImpossiblePostselection") != std::string::npos);
    // Single observable: --observable may be omitted.
    CHECK(call({"abl", "--scenario", path.string()}).code == 2);

    const auto bad = temp_file("ablkit_bad.json", "{\"dim\": 2,\n  \"preselection\": [1, 0]\n");
    const Result parse = call({"scenario", "validate", "--scenario", bad.string()});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("line") != std::string::npos);

    CHECK(call({"abl", "--builtin", "three-box", "--observable", "Q"}).code == 1);
    CHECK(call({"abl", "--builtin", "three-box"}).code == 1);
    CHECK(call({"abl", "--builtin", "nowhere", "--observable", "C"}).code == 1);
    CHECK(call({"simulate", "--builtin", "three-box", "--trials", "0"}).code == 1);
    CHECK(call({"counterexample", "--dim", "9"}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({}).code == 1);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("consistency report") {
    const auto c = call_json({"consistency", "--builtin", "three-box", "--observable", "C"});
    CHECK(c["verdicts"]["consistency"] == "inconsistent");
    CHECK(c["verdicts"]["bcac"] == "fails");
    CHECK(std::abs(c["results"]["max_violation"].get<double>() - 1.0 / 9.0) <= tol::alg);
    CHECK(std::abs(c["results"]["decoherence"][0][1][0].get<double>() - 1.0 / 9.0) <= tol::alg);

    const auto cp = call_json({"consistency", "--builtin", "three-box", "--observable", "Cprime"});
    CHECK(cp["verdicts"]["consistency"] == "consistent");
    CHECK(cp["verdicts"]["bcac"] == "holds");

    const auto cg = call_json({"consistency", "--builtin", "three-box", "--observable", "C", "--coarse-grainings"});
    const auto& list = cg["coarse_grainings"];
    REQUIRE(list.size() == 5);
    int consistent = 0;
    for (const auto& e : list) consistent += e["verdicts"]["consistency"] == "consistent";
    // Single block, {1}{23} and {13}{2} are consistent; {12}{3} and the finest are not.
    CHECK(consistent == 3);
    CHECK(list[4]["matches"][0] == "C");

    const auto weak = call_json({"consistency", "--builtin", "three-box", "--observable", "C", "--weak"});
    CHECK(weak["criterion"] == "weak");
}

TEST_CASE("simulate report") {
    const auto r = call_json({"simulate", "--builtin", "three-box", "--observable", "C", "--trials", "200000",
                              "--seed", "42", "--threads", "4"});
    for (const auto& z : r["results"]["z_scores"]) CHECK(std::abs(z.get<double>()) <= 4.0);
    CHECK(r["verdicts"]["abl_agreement"] == "holds");
    CHECK(r["verdicts"]["final_probability_agreement"] == "holds");
    CHECK(std::abs(r["results"]["final_probability"]["exact"].get<double>() - 1.0 / 3.0) <= tol::alg);

    const auto one = call_json({"simulate", "--builtin", "three-box", "--observable", "C", "--trials", "200000",
                                "--seed", "42", "--threads", "1"});
    CHECK(one["results"] == r["results"]);

    const auto none = call_json({"simulate", "--builtin", "three-box", "--trials", "20000"});
    CHECK(none["observable"].is_null());
    CHECK(std::abs(none["results"]["final_probability"]["exact"].get<double>() - 1.0 / 9.0) <= tol::alg);
}

TEST_CASE("counterexample search and replay") {
    const auto found = call_json({"counterexample", "--dim", "2", "--seed", "3", "--gap-min", "0.05"});
    REQUIRE(found["status"] == "found");
    CHECK(found["verdicts"]["vaidman_identity"] == "holds");
    CHECK(found["verdicts"]["sharp_shanks_identity"] == "fails");

    const auto path = temp_file("ablkit_cx.json", found["scenario"].dump(2));
    const auto replay = call_json({"abl", "--scenario", path.string(), "--observable", "C", "--final-basis", "final",
                                   "--branch", std::to_string(found["branch"].get<std::size_t>())});
    CHECK(replay["results"]["mixing"]["ss_gap"].get<double>() == found["results"]["ss_gap"].get<double>());

    const Result none = call({"counterexample", "--gap-min", "2", "--max-tries", "50"});
    CHECK(none.code == 2);
    CHECK(none.out.find("not found") != std::string::npos);

    const auto survey = call_json({"counterexample", "--dim", "3", "--max-tries", "100", "--survey"});
    CHECK(survey["hit_rate"]["tries"] == 100);
}

TEST_CASE("scenario utilities") {
    const Result list = call({"scenario", "list"});
    CHECK(list.code == 0);
    CHECK(list.out.find("three-box") != std::string::npos);

    const Result emitted = call({"scenario", "emit", "--builtin", "three-box"});
    REQUIRE(emitted.code == 0);
    const auto path = temp_file("ablkit_tb.json", emitted.out);
    CHECK(call({"scenario", "emit", "--scenario", path.string()}).out == emitted.out);
    const Result valid = call({"scenario", "validate", "--scenario", path.string()});
    CHECK(valid.code == 0);
    CHECK(valid.out.find("dimension 3") != std::string::npos);
}
