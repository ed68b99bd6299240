// scenario.hpp
// A pre/postselected setup plus a set of named intermediate observables, the
// compiled-in examples, and the JSON scenario file format.
//
// File format (all complex numbers are [re, im] pairs; a bare number is read
// as a real amplitude):
//
//   {
//     "name": "three-box",                       optional
//     "dim": 3,
//     "preselection":  [[0.577..., 0], ...],     unit vector, length dim
//     "postselection": [[0.577..., 0], ...],
//     "observables": {
//       "C": [
//         {"eigenvalue": 1, "span": [[[1,0],[0,0],[0,0]]]},
//         {"eigenvalue": 2, "projector": [[[0,0],[0,0],[0,0]], ...]},
//         ...
//       ]
//     }
//   }
//
// Each branch gives either "span" (list of spanning vectors, any nonzero
// norm, linearly independent) or "projector" (dim x dim matrix). Observables
// keep file order. Emission always writes "projector" matrices, so
// emit -> parse -> emit is byte-identical.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ablkit/abl.hpp"
#include "ablkit/linalg.hpp"

namespace ablkit {

struct NamedObservable {
    std::string name;
    ObservableDecomposition decomposition;
};

struct Scenario {
    std::string name;
    Ket preselection;
    Ket postselection;
    std::vector<NamedObservable> observables;

    std::size_t dim() const noexcept { return preselection.dim(); }
    PrePostContext context() const { return PrePostContext(preselection, postselection); }

    // Throws InvalidArgument naming the available observables.
    const ObservableDecomposition& observable(std::string_view name) const;
    const NamedObservable* find(std::string_view name) const;
};

// ---------------------------------------------------------------- built-ins

// Three boxes: a = (u1 + u2 + u3)/sqrt3, b = (u1 + u2 - u3)/sqrt3 with
// observables
//   C             {u1}, {u2}, {u3}          labels 1, 2, 3
//   Cprime        {u1}, {u2, u3}            labels 1, 2
//   Cdoubleprime  {u1, u3}, {u2}            labels 1, 2
//   Pab           {span(a, b)}, complement  labels 1, 2
//   A, B          bases containing a and b respectively
Scenario three_box();

// Spin 1/2 with a = b = |+z>. Observables: "n" (spin along
// n = (sin theta, 0, cos theta), labels +1, -1), "Z" and "X".
Scenario spin(double theta);

// Three-box preselection with b = a (postselection that selects nothing);
// observables C, Cprime, Cdoubleprime.
Scenario preselect_only();

// Fixed non-orthogonal complex a, b in dimension 3 with observable "A" (basis
// containing a) or "B" (basis containing b).
Scenario identity_a();
Scenario identity_b();

// Names: three-box, spin-pi3, spin:<theta in radians>, preselect-only,
// identity-A, identity-B.
std::optional<Scenario> builtin_scenario(std::string_view name);
std::vector<std::string> builtin_names();

// -------------------------------------------------------------------- JSON

using ordered_json = nlohmann::ordered_json;

ordered_json complex_to_json(Complex z);
ordered_json ket_to_json(const Ket& k);
ordered_json projector_to_json(const Projector& p);
ordered_json observable_to_json(const ObservableDecomposition& obs);
ordered_json scenario_to_json(const Scenario& s);

// Throws ParseError with the offending field path (or line/column for
// malformed JSON text).
Scenario scenario_from_json(const ordered_json& j);
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

// Canonical text form: 2-space indented JSON followed by a newline.
std::string emit_scenario(const Scenario& s);

}  // namespace ablkit
