#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "spinloc/bell.hpp"

using namespace spinloc;

namespace {

QuantumState ghz(int n) {
    QuantumState st;
    st.pure = true;
    st.n_sites = n;
    st.vec = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
    st.vec[0] = st.vec[st.vec.size() - 1] = 1.0 / std::sqrt(2.0);
    return st;
}

QuantumState maximally_mixed_state(int n) {
    QuantumState st;
    st.pure = false;
    st.n_sites = n;
    const Eigen::Index d = Eigen::Index(1) << n;
    st.mat = Eigen::MatrixXcd::Identity(d, d) / double(d);
    return st;
}

std::vector<Region> single_site_regions(int n) {
    std::vector<Region> r;
    for (int i = 0; i < n; ++i) r.push_back(Region{{i}});
    return r;
}

}  // namespace

TEST_CASE("svetlichny3 catalog structure") {
    const BellInequality sv = svetlichny3();
    CHECK(sv.name == "svetlichny3");
    CHECK(sv.n == 3);
    CHECK(sv.inputs == 2);
    CHECK(sv.terms.size() == 8);
    CHECK(sv.eta() == doctest::Approx(8.0));
    CHECK(sv.full_correlator());
    REQUIRE(sv.delta_loc.has_value());
    CHECK(*sv.delta_loc == doctest::Approx(4.0));
    // sign pattern: +1 when the input sum is 0 or 1, else -1
    for (const auto& t : sv.terms) {
        int s = 0;
        for (int k : t.inputs) s += k;
        CHECK(t.coeff == doctest::Approx(s <= 1 ? 1.0 : -1.0));
    }
}

TEST_CASE("seevinck_svetlichny family signs and bounds") {
    const BellInequality p4 = seevinck_svetlichny(4, +1);
    CHECK(p4.name == "seevinck_svetlichny4+");
    CHECK(p4.terms.size() == 16);
    CHECK(p4.eta() == doctest::Approx(16.0));
    REQUIRE(p4.delta_loc.has_value());
    CHECK(*p4.delta_loc == doctest::Approx(8.0));
    // nu_k^+ = (-1)^{k(k+1)/2}: pattern +,-,-,+ on input sums 0..3 mod 4
    for (const auto& t : p4.terms) {
        int s = 0;
        for (int k : t.inputs) s += k;
        const double expect = ((s * (s + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
        CHECK(t.coeff == doctest::Approx(expect));
    }
    // the minus variant at n=3 reproduces the svetlichny3 signs
    const BellInequality m3 = seevinck_svetlichny(3, -1);
    const BellInequality sv = svetlichny3();
    for (size_t i = 0; i < m3.terms.size(); ++i) {
        int s = 0;
        for (int k : m3.terms[i].inputs) s += k;
        CHECK(m3.terms[i].coeff == doctest::Approx(s <= 1 ? 1.0 : -1.0));
    }
    CHECK(m3.terms.size() == sv.terms.size());
}

TEST_CASE("biseparable bounds are exact") {
    CHECK(biseparable_bound(svetlichny3()) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(biseparable_bound(seevinck_svetlichny(3, +1)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(biseparable_bound(seevinck_svetlichny(3, -1)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(biseparable_bound(seevinck_svetlichny(4, +1)) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK_THROWS_AS(biseparable_bound(seevinck_svetlichny(5, +1)), ResourceError);
}

TEST_CASE("two-party chsh-style bound is 2") {
    // full-correlator CHSH: <A0B0> + <A0B1> + <A1B0> - <A1B1>
    BellInequality chsh;
    chsh.name = "chsh";
    chsh.n = 2;
    chsh.inputs = 2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            BellTerm t;
            t.parties = {0, 1};
            t.inputs = {a, b};
            t.coeff = (a == 1 && b == 1) ? -1.0 : 1.0;
            chsh.terms.push_back(t);
        }
    CHECK(biseparable_bound(chsh) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("see-saw reaches the GHZ maximum of svetlichny3") {
    const QuantumState st = ghz(3);
    OptimizeOptions opts;
    opts.restarts = 8;
    opts.seed = 42;
    const BellResult res = optimize(st, svetlichny3(), single_site_regions(3), opts);
    CHECK(res.value == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(res.converged);
    CHECK(res.restarts_used == 8);
    // evaluate() reproduces the optimizer's own value on its assignment
    CHECK(evaluate(st, svetlichny3(), res.assignment) == doctest::Approx(res.value).epsilon(1e-12));
}

TEST_CASE("see-saw value on the maximally mixed state is zero") {
    const QuantumState st = maximally_mixed_state(3);
    OptimizeOptions opts;
    opts.restarts = 3;
    opts.seed = 7;
    const BellResult res = optimize(st, svetlichny3(), single_site_regions(3), opts);
    CHECK(std::abs(res.value) < 1e-12);
}

TEST_CASE("see-saw is deterministic in the seed") {
    const QuantumState st = random_biseparable_state(3, {0.5, 0.3, 0.2}, 99);
    OptimizeOptions opts;
    opts.restarts = 4;
    opts.seed = 1234;
    const BellResult a = optimize(st, svetlichny3(), single_site_regions(3), opts);
    const BellResult b = optimize(st, svetlichny3(), single_site_regions(3), opts);
    CHECK(a.value == b.value);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("party relabeling leaves the optimum invariant") {
    // GHZ is permutation symmetric and so is the inequality up to relabeling:
    // optimizing with regions listed in a different site order must agree.
    const QuantumState st = ghz(3);
    OptimizeOptions opts;
    opts.restarts = 8;
    opts.seed = 5;
    const BellResult a = optimize(st, svetlichny3(), {Region{{0}}, Region{{1}}, Region{{2}}}, opts);
    const BellResult b = optimize(st, svetlichny3(), {Region{{2}}, Region{{0}}, Region{{1}}}, opts);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}

TEST_CASE("biseparable samples never violate the biseparable bound") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const QuantumState st =
            random_biseparable_state(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, seed);
        OptimizeOptions opts;
        opts.restarts = 4;
        opts.seed = seed;
        const BellResult res = optimize(st, svetlichny3(), single_site_regions(3), opts);
        CHECK(res.value <= 4.0 + 1e-8);
    }
}

TEST_CASE("random_biseparable_state validates its inputs") {
    CHECK(bipartition_count(3) == 3);
    CHECK(bipartition_count(4) == 7);
    CHECK_THROWS_AS(random_biseparable_state(3, {0.5, 0.5}, 1), ConfigError);
    CHECK_THROWS_AS(random_biseparable_state(3, {0.5, 0.3, 0.3}, 1), ConfigError);
    const QuantumState st = random_biseparable_state(3, {1, 0, 0}, 11);
    CHECK_FALSE(st.pure);
    CHECK(st.mat.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(st) <= 1.0 + 1e-12);
}

TEST_CASE("coefficient sums for the catalog inequalities") {
    // all strata have s = n, |psi| = 1; single-site regions give |X_j| = 1
    const CoefficientSums sv = coefficient_sums(svetlichny3(), {1, 1, 1});
    CHECK(sv.eta == doctest::Approx(8.0));
    CHECK(sv.gamma == doctest::Approx(8.0));       // (3-2) * 8
    CHECK(sv.gamma_hat == doctest::Approx(8.0));
    CHECK(sv.mu == doctest::Approx(8.0));
    CHECK(sv.mu_hat == doctest::Approx(8.0));

    const CoefficientSums ss4 = coefficient_sums(seevinck_svetlichny(4, +1), {1, 1, 1, 1});
    CHECK(ss4.eta == doctest::Approx(16.0));
    CHECK(ss4.gamma == doctest::Approx(32.0));     // (4-2) * 16
    CHECK(ss4.mu == doctest::Approx(32.0));        // alpha = s-2 at unit norms
    CHECK(ss4.mu_hat == doctest::Approx(16.0));
}

TEST_CASE("coefficient sums scale with region operator norms") {
    // two-site regions: |X_j| can reach 1 only (normalized); the size list
    // only checks arity here, so mismatched lengths must throw
    CHECK_THROWS_AS(coefficient_sums(svetlichny3(), {1, 1}), ConfigError);
}

TEST_CASE("inequality validation rejects malformed terms") {
    BellInequality bad;
    bad.name = "bad";
    bad.n = 2;
    bad.inputs = 2;
    BellTerm t;
    t.parties = {0, 0};  // duplicate party
    t.inputs = {0, 1};
    t.coeff = 1;
    bad.terms.push_back(t);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.terms[0].parties = {0, 1};
    bad.terms[0].inputs = {0, 5};  // input out of range
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.terms[0].inputs = {0, 1};
    CHECK_NOTHROW(bad.validate());
}
