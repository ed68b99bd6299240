#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ablkit/errors.hpp"
#include "ablkit/histories.hpp"
#include "ablkit/scenario.hpp"
#include "oracle.hpp"

using namespace ablkit;

namespace {

struct ThreeBox {
    Scenario s = three_box();
    PrePostContext ctx = s.context();
    HistoryFamily family(const char* name) const { return HistoryFamily(ctx, s.observable(name)); }
};

// Bell numbers for the partition counts.
constexpr std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203};

}  // namespace

TEST_CASE("decoherence functional examples") {
    const ThreeBox tb;
    // h1 = (P_a, {P_u1, I - P_u1}, P_b)
    const auto h1 = tb.family("Cprime");
    CHECK(std::abs(decoherence_functional(h1, 0, 1)) <= tol::alg);
    // h3 = (P_a, {P_u1, P_u2, P_u3}, P_b)
    const auto h3 = tb.family("C");
    CHECK(std::abs(decoherence_functional(h3, 0, 1) - 1.0 / 9.0) <= tol::alg);
    CHECK(std::abs(decoherence_functional(h3, 0, 2) + 1.0 / 9.0) <= tol::alg);
    for (std::size_t i = 0; i < 3; ++i) {
        const Complex dii = decoherence_functional(h3, i, i);
        CHECK(std::abs(dii.imag()) <= tol::alg);
        CHECK(std::abs(dii.real() - joint_probability(tb.ctx, tb.s.observable("C"), i)) <= tol::alg);
    }
    CHECK_THROWS_AS(decoherence_functional(h3, 0, 3), IndexOutOfRange);
}

TEST_CASE("consistency verdicts on the three-box families") {
    const ThreeBox tb;
    const auto h1 = is_consistent(tb.family("Cprime"));
    const auto h2 = is_consistent(tb.family("Cdoubleprime"));
    const auto h3 = is_consistent(tb.family("C"));
    CHECK(h1.consistent);
    CHECK(h2.consistent);
    CHECK_FALSE(h3.consistent);
    CHECK(std::abs(h3.max_violation - 1.0 / 9.0) <= tol::alg);
    CHECK(is_consistent(tb.family("Pab")).consistent);
    CHECK(is_consistent(tb.family("A")).consistent);
    CHECK(is_consistent(tb.family("B")).consistent);

    // Weak consistency only looks at real parts; for these real families the
    // verdicts agree.
    const ConsistencyOptions weak{ConsistencyCriterion::weak, tol::cons};
    CHECK(is_consistent(tb.family("Cprime"), weak).consistent);
    CHECK_FALSE(is_consistent(tb.family("C"), weak).consistent);
}

TEST_CASE("weak and medium consistency differ on purely imaginary interference") {
    // a = |0>, b = (|0> + |1>)/sqrt2, intermediate basis {(|0> + i|1>)/sqrt2, (|0> - i|1>)/sqrt2}.
    const PrePostContext ctx(Ket::basis(2, 0), Ket::normalized({1.0, 1.0}));
    const auto y = ObservableDecomposition::basis_containing(Ket::normalized({1.0, Complex(0, 1)}));
    const HistoryFamily fam(ctx, y);
    const Complex d01 = decoherence_functional(fam, 0, 1);
    CHECK(std::abs(d01.real()) <= tol::alg);
    CHECK(std::abs(d01.imag()) > 0.1);
    CHECK_FALSE(is_consistent(fam).consistent);
    CHECK(is_consistent(fam, {ConsistencyCriterion::weak, tol::cons}).consistent);
}

TEST_CASE("bcac_check examples") {
    const ThreeBox tb;
    const auto h1 = bcac_check(tb.family("Cprime"));
    CHECK(std::abs(h1.lhs - 1.0 / 9.0) <= tol::alg);
    CHECK(std::abs(h1.rhs - 1.0 / 9.0) <= tol::alg);
    CHECK(h1.holds);

    const auto h3 = bcac_check(tb.family("C"));
    CHECK(std::abs(h3.lhs - 1.0 / 9.0) <= tol::alg);
    CHECK(std::abs(h3.rhs - 1.0 / 3.0) <= tol::alg);
    CHECK_FALSE(h3.holds);

    const auto hb = bcac_check(tb.family("B"));
    CHECK(std::abs(hb.lhs - hb.rhs) <= tol::alg);
    CHECK(hb.holds);
}

TEST_CASE("history family validation") {
    const ThreeBox tb;
    const Projector rank2 = tb.s.observable("Cprime")[1].projector;
    CHECK_THROWS_AS(HistoryFamily(rank2, tb.s.observable("C"), tb.ctx.post_projector()), InvalidArgument);
    const Projector small = Projector::onto(Ket::basis(2, 0));
    CHECK_THROWS_AS(HistoryFamily(small, tb.s.observable("C"), tb.ctx.post_projector()), DimensionMismatch);
}

TEST_CASE("coarse-graining enumeration") {
    for (std::size_t n = 1; n <= 6; ++n) CHECK(set_partitions(n).size() == bell[n]);

    const auto two = ObservableDecomposition::basis_containing(Ket::basis(2, 0));
    CHECK(enumerate_coarse_grainings(two).size() == 2);

    const ThreeBox tb;
    const auto grains = enumerate_coarse_grainings(tb.s.observable("C"));
    REQUIRE(grains.size() == 5);
    auto contains = [&](const ObservableDecomposition& target) {
        return std::any_of(grains.begin(), grains.end(),
                           [&](const ObservableDecomposition& g) { return g.same_projectors(target); });
    };
    CHECK(contains(tb.s.observable("Cprime")));
    CHECK(contains(tb.s.observable("Cdoubleprime")));
    CHECK(contains(tb.s.observable("C")));
    CHECK(grains.front().size() == 1);  // single block
    CHECK(grains.back().size() == 3);   // finest
    for (const auto& g : grains) {
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(g[k].eigenvalue == static_cast<double>(k + 1));
    }

    oracle::Rng rng(3);
    const auto seven = ObservableDecomposition::from_basis(rng.basis(7));
    CHECK_THROWS_AS(enumerate_coarse_grainings(seven), TooManyBranches);
}

TEST_CASE("property: functional structure and consistency implies bcac") {
    oracle::Rng rng(99);
    int consistent_seen = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t d = 2 + rng.below(4);
        const Ket a = rng.ket(d), b = rng.ket(d);
        const PrePostContext ctx(a, b);
        // Alternate between random observables and the always-consistent bases.
        const auto obs = trial % 3 == 0   ? ObservableDecomposition::basis_containing(a)
                         : trial % 3 == 1 ? ObservableDecomposition::basis_containing(b)
                                          : rng.observable(d);
        const HistoryFamily fam(ctx, obs);
        const auto rep = is_consistent(fam);

        Complex total = 0.0;
        for (std::size_t i = 0; i < fam.size(); ++i) {
            CHECK(rep.at(i, i).real() >= -tol::alg);
            for (std::size_t j = 0; j < fam.size(); ++j) {
                total += rep.at(i, j);
                CHECK(std::abs(rep.at(i, j) - std::conj(rep.at(j, i))) <= tol::alg);
                const Complex expect = oracle::decoherence(oracle::to_vec(a), oracle::to_vec(b), obs, i, j);
                CHECK(std::abs(rep.at(i, j) - expect) <= tol::alg);
            }
        }
        CHECK(std::abs(total - ctx.undisturbed_final_probability()) <= tol::alg);
        if (rep.consistent) {
            ++consistent_seen;
            CHECK(bcac_check(fam).holds);
        }
    }
    CHECK(consistent_seen > 200);
}
