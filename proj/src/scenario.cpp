#include "ablkit/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ablkit/errors.hpp"

namespace ablkit {

namespace {

Ket ket(std::initializer_list<Complex> amps) { return Ket::normalized(std::vector<Complex>(amps)); }

Projector span_of(std::initializer_list<Ket> kets) { return projector_from_kets(kets); }

}  // namespace

const NamedObservable* Scenario::find(std::string_view name) const {
    for (const auto& o : observables) {
        if (o.name == name) return &o;
    }
    return nullptr;
}

const ObservableDecomposition& Scenario::observable(std::string_view name) const {
    if (const auto* o = find(name)) return o->decomposition;
    std::string known;
    for (const auto& o : observables) known += (known.empty() ? "" : ", ") + o.name;
    throw InvalidArgument("unknown observable '" + std::string(name) + "' (available: " + known + ")");
}

// ------------------------------------------------------------ built-ins

Scenario three_box() {
    const Ket u1 = Ket::basis(3, 0), u2 = Ket::basis(3, 1), u3 = Ket::basis(3, 2);
    const Ket a = ket({1.0, 1.0, 1.0});
    const Ket b = ket({1.0, 1.0, -1.0});
    const Projector pab = span_of({a, b});

    std::vector<NamedObservable> obs;
    obs.push_back({"C", ObservableDecomposition({{1.0, Projector::onto(u1)},
                                                 {2.0, Projector::onto(u2)},
                                                 {3.0, Projector::onto(u3)}})});
    obs.push_back({"Cprime", ObservableDecomposition({{1.0, Projector::onto(u1)},
                                                      {2.0, span_of({u2, u3})}})});
    obs.push_back({"Cdoubleprime", ObservableDecomposition({{1.0, span_of({u1, u3})},
                                                            {2.0, Projector::onto(u2)}})});
    obs.push_back({"Pab", ObservableDecomposition::binary(pab)});
    obs.push_back({"A", ObservableDecomposition::basis_containing(a)});
    obs.push_back({"B", ObservableDecomposition::basis_containing(b)});
    return {"three-box", a, b, std::move(obs)};
}

Scenario spin(double theta) {
    const Ket up = Ket::basis(2, 0), down = Ket::basis(2, 1);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const Ket n_up = ket({c, s});
    const Ket n_down = ket({-s, c});
    const Ket x_up = ket({1.0, 1.0});
    const Ket x_down = ket({1.0, -1.0});

    std::vector<NamedObservable> obs;
    obs.push_back({"n", ObservableDecomposition({{1.0, Projector::onto(n_up)},
                                                 {-1.0, Projector::onto(n_down)}})});
    obs.push_back({"Z", ObservableDecomposition({{1.0, Projector::onto(up)},
                                                 {-1.0, Projector::onto(down)}})});
    obs.push_back({"X", ObservableDecomposition({{1.0, Projector::onto(x_up)},
                                                 {-1.0, Projector::onto(x_down)}})});
    std::ostringstream name;
    name.precision(17);
    name << "spin:" << theta;
    return {name.str(), up, up, std::move(obs)};
}

Scenario preselect_only() {
    Scenario s = three_box();
    s.name = "preselect-only";
    s.postselection = s.preselection;
    std::erase_if(s.observables, [](const NamedObservable& o) {
        return o.name != "C" && o.name != "Cprime" && o.name != "Cdoubleprime";
    });
    return s;
}

namespace {

Ket identity_pre() { return ket({1.0, {0.5, 0.5}, {0.0, -0.25}}); }
Ket identity_post() { return ket({0.3, -1.0, {0.2, 0.7}}); }

}  // namespace

Scenario identity_a() {
    const Ket a = identity_pre();
    return {"identity-A", a, identity_post(), {{"A", ObservableDecomposition::basis_containing(a)}}};
}

Scenario identity_b() {
    const Ket b = identity_post();
    return {"identity-B", identity_pre(), b, {{"B", ObservableDecomposition::basis_containing(b)}}};
}

std::vector<std::string> builtin_names() {
    return {"three-box", "spin-pi3", "spin:<theta>", "preselect-only", "identity-A", "identity-B"};
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
    if (name == "three-box") return three_box();
    if (name == "spin-pi3") {
        Scenario s = spin(std::numbers::pi / 3.0);
        s.name = "spin-pi3";
        return s;
    }
    if (name.starts_with("spin:")) {
        const std::string arg(name.substr(5));
        char* end = nullptr;
        const double theta = std::strtod(arg.c_str(), &end);
        if (arg.empty() || end != arg.c_str() + arg.size() || !std::isfinite(theta)) return std::nullopt;
        return spin(theta);
    }
    if (name == "preselect-only") return preselect_only();
    if (name == "identity-A") return identity_a();
    if (name == "identity-B") return identity_b();
    return std::nullopt;
}

// ----------------------------------------------------------------- JSON

ordered_json complex_to_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json ket_to_json(const Ket& k) {
    auto out = ordered_json::array();
    for (const auto& z : k.amplitudes()) out.push_back(complex_to_json(z));
    return out;
}

ordered_json projector_to_json(const Projector& p) {
    auto rows = ordered_json::array();
    for (std::size_t r = 0; r < p.dim(); ++r) {
        auto row = ordered_json::array();
        for (std::size_t c = 0; c < p.dim(); ++c) row.push_back(complex_to_json(p.op()(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json observable_to_json(const ObservableDecomposition& obs) {
    auto out = ordered_json::array();
    for (const auto& b : obs.branches()) {
        ordered_json br;
        br["eigenvalue"] = b.eigenvalue;
        br["projector"] = projector_to_json(b.projector);
        out.push_back(std::move(br));
    }
    return out;
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["dim"] = s.dim();
    j["preselection"] = ket_to_json(s.preselection);
    j["postselection"] = ket_to_json(s.postselection);
    ordered_json obs = ordered_json::object();
    for (const auto& o : s.observables) obs[o.name] = observable_to_json(o.decomposition);
    j["observables"] = std::move(obs);
    return j;
}

std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ParseError(path + ": " + msg);
}

const ordered_json& field(const ordered_json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
}

double real_of(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Complex complex_of(const ordered_json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im] pair or a real number");
    return {real_of(j[0], path + "[0]"), real_of(j[1], path + "[1]")};
}

std::vector<Complex> vector_of(const ordered_json& j, const std::string& path, std::size_t dim) {
    if (!j.is_array()) fail(path, "expected an array of amplitudes");
    if (j.size() != dim) {
        fail(path, "expected " + std::to_string(dim) + " amplitudes, got " + std::to_string(j.size()));
    }
    std::vector<Complex> v;
    v.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) v.push_back(complex_of(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Ket ket_of_json(const ordered_json& j, const std::string& path, std::size_t dim) {
    try {
        return Ket(vector_of(j, path, dim));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

Projector branch_projector(const ordered_json& br, const std::string& path, std::size_t dim) {
    const bool has_span = br.contains("span");
    const bool has_matrix = br.contains("projector");
    if (has_span == has_matrix) fail(path, "branch needs exactly one of 'span' or 'projector'");
    try {
        if (has_span) {
            const auto& span = br["span"];
            if (!span.is_array() || span.empty()) fail(path + ".span", "expected a nonempty list of vectors");
            std::vector<std::vector<Complex>> vectors;
            for (std::size_t k = 0; k < span.size(); ++k) {
                vectors.push_back(vector_of(span[k], path + ".span[" + std::to_string(k) + "]", dim));
            }
            return projector_from_vectors(vectors);
        }
        const auto& m = br["projector"];
        if (!m.is_array() || m.size() != dim) {
            fail(path + ".projector", "expected " + std::to_string(dim) + " rows");
        }
        std::vector<Complex> entries;
        entries.reserve(dim * dim);
        for (std::size_t r = 0; r < dim; ++r) {
            const auto row = vector_of(m[r], path + ".projector[" + std::to_string(r) + "]", dim);
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return Projector(Operator(dim, std::move(entries)));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

ObservableDecomposition observable_of(const ordered_json& j, const std::string& path, std::size_t dim) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty list of branches");
    std::vector<Branch> branches;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string bp = path + "[" + std::to_string(k) + "]";
        if (!j[k].is_object()) fail(bp, "expected a branch object");
        const double ev = real_of(field(j[k], bp, "eigenvalue"), bp + ".eigenvalue");
        branches.push_back({ev, branch_projector(j[k], bp, dim)});
    }
    try {
        return ObservableDecomposition(std::move(branches));
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

}  // namespace

Scenario scenario_from_json(const ordered_json& j) {
    if (!j.is_object()) fail("$", "scenario must be a JSON object");
    const auto& dim_j = field(j, "$", "dim");
    if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1) fail("$.dim", "expected a positive integer");
    const auto dim = static_cast<std::size_t>(dim_j.get<long long>());

    std::string name;
    if (j.contains("name")) {
        if (!j["name"].is_string()) fail("$.name", "expected a string");
        name = j["name"].get<std::string>();
    }
    Ket pre = ket_of_json(field(j, "$", "preselection"), "$.preselection", dim);
    Ket post = ket_of_json(field(j, "$", "postselection"), "$.postselection", dim);

    const auto& obs_j = field(j, "$", "observables");
    if (!obs_j.is_object()) fail("$.observables", "expected an object of named observables");
    std::vector<NamedObservable> obs;
    for (const auto& [key, value] : obs_j.items()) {
        obs.push_back({key, observable_of(value, "$.observables." + key, dim)});
    }
    return {std::move(name), std::move(pre), std::move(post), std::move(obs)};
}

Scenario parse_scenario(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into line/column.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": malformed JSON");
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace ablkit
