#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "geoquant/cech.hpp"
#include "geoquant/error.hpp"

using namespace geoquant;

namespace {

CechCover four_set_constant(std::mt19937& rng, bool integer_values) {
    std::uniform_real_distribution<double> u(-3, 3);
    CechCover c(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double v = integer_values ? std::round(u(rng)) : u(rng);
            c.set_exponent(i, j, OverlapFunction::of_constant(v));
        }
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            for (std::size_t k = j + 1; k < 4; ++k) c.add_triple({i, j, k, {}});
    return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("geoquant_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("trivial bundle: all exponents zero") {
    CechCover c(3);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 2}, {0, 2}})
        c.set_exponent(i, j, OverlapFunction::of_constant(0.0));
    c.add_triple({0, 1, 2, {}});
    CHECK(verify_cocycle(c, 1e-9).ok);
    const auto cls = integrality_class(c, 1e-9);
    CHECK(cls.a == std::vector<double>{0.0});
    CHECK(cls.is_integral);
    CHECK(cls.total_integer() == 0);
    CHECK_FALSE(cls.x_shift.has_value());
}

TEST_CASE("circle cover with q_13 = -1 has a_123 = 1") {
    const auto c = fixtures::circle_constant();
    CHECK(verify_cocycle(c, 1e-9).ok);
    const auto cls = integrality_class(c, 1e-9);
    CHECK(cls.a[0] == 1.0);
    CHECK(cls.integers == std::vector<long>{1});
}

TEST_CASE("antisymmetric storage and odd permutations") {
    auto c = fixtures::circle_constant();
    CHECK(c.exponent(2, 0, 0) == 1.0);
    c.add_triple({1, 0, 2, {}});
    c.add_triple({0, 2, 1, {}});
    c.add_triple({1, 2, 0, {}});
    const auto cls = integrality_class(c, 1e-9);
    CHECK(cls.a == std::vector<double>{1.0, -1.0, -1.0, 1.0});
}

TEST_CASE("non-matching parameter dependence is reported on the offending triple") {
    auto c = fixtures::sphere_charge(1.0);
    REQUIRE(verify_cocycle(c, 1e-6).ok);
    // bend q_NA on the component near phi = pi only
    std::vector<double> q(c.sample_count());
    for (std::size_t s = 0; s < q.size(); ++s) q[s] = c.exponent(0, 1, s);
    const auto& near_pi = c.triples()[0].samples;
    for (std::size_t n = 0; n < near_pi.size(); ++n) q[near_pi[n]] += 0.01 * static_cast<double>(n);
    c.set_exponent(0, 1, OverlapFunction::of_samples(q));
    const auto r = verify_cocycle(c, 1e-6);
    CHECK_FALSE(r.ok);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].triple == 0);
    CHECK(r.violations[0].spread == doctest::Approx(0.01 * static_cast<double>(near_pi.size() - 1)));
    CHECK_THROWS_AS(integrality_class(c, 1e-6), PreconditionError);
}

TEST_CASE("missing overlap for a declared triple is a structure error") {
    CechCover c(3);
    c.set_exponent(0, 1, OverlapFunction::of_constant(0.0));
    c.set_exponent(1, 2, OverlapFunction::of_constant(0.0));
    c.add_triple({0, 1, 2, {}});
    CHECK_THROWS_AS(verify_cocycle(c, 1e-9), StructureError);
}

TEST_CASE("sphere fixture carries its monopole charge") {
    for (int n = -3; n <= 3; ++n) {
        const auto c = fixtures::sphere_charge(n);
        CHECK(verify_cocycle(c, 1e-6).ok);
        const auto cls = integrality_class(c, 1e-6);
        CHECK(cls.is_integral);
        CHECK(cls.total_integer() == n);
        CHECK(cls.total == doctest::Approx(n));
    }
}

TEST_CASE("irrationally scaled sphere fixture is not quantizable") {
    const auto c = fixtures::sphere_charge(1.0).scaled(std::numbers::sqrt2);
    CHECK(verify_cocycle(c, 1e-6).ok);
    const auto cls = integrality_class(c, 1e-6);
    CHECK_FALSE(cls.is_integral);
    CHECK_FALSE(cls.quantizable);
    CHECK_FALSE(cls.x_shift.has_value());
    CHECK(cls.total == doctest::Approx(std::numbers::sqrt2));
}

TEST_CASE("constant adjustment integralizes a fractional but exact class") {
    CechCover c(3);
    c.set_exponent(0, 1, OverlapFunction::of_constant(0.25));
    c.set_exponent(1, 2, OverlapFunction::of_constant(0.0));
    c.set_exponent(0, 2, OverlapFunction::of_constant(-1.1));
    c.add_triple({0, 1, 2, {}});
    const auto cls = integrality_class(c, 1e-9);
    CHECK_FALSE(cls.is_integral);
    CHECK(cls.quantizable);
    REQUIRE(cls.x_shift.has_value());
    const auto& x = *cls.x_shift;
    const double z = cls.a[0] + x.at({0, 1}) + x.at({1, 2}) - x.at({0, 2});
    CHECK(std::abs(z - std::round(z)) < 1e-12);
    CHECK(cls.z[0] == doctest::Approx(z));
}

TEST_CASE("gauge move leaves the integer class unchanged") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int n : {0, 1, 2, -4}) {
        const auto c = fixtures::sphere_charge(n);
        const auto base = integrality_class(c, 1e-6);
        for (int trial = 0; trial < 5; ++trial) {
            const auto moved = c.gauge_moved({u(rng), u(rng), u(rng)});
            const auto cls = integrality_class(moved, 1e-6);
            CHECK(cls.is_integral);
            CHECK(cls.integers == base.integers);
            CHECK(cls.total_integer() == n);
        }
    }
    auto c4 = four_set_constant(rng, true);
    const auto base = integrality_class(c4, 1e-9);
    const auto cls = integrality_class(c4.gauge_moved({u(rng), u(rng), u(rng), u(rng)}), 1e-9);
    CHECK(cls.integers == base.integers);
}

TEST_CASE("closedness: quadruple coboundary vanishes") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        CHECK(quadruple_coboundary(four_set_constant(rng, true)) == 0.0);
        CHECK(quadruple_coboundary(four_set_constant(rng, false)) < 1e-12);
    }
    CHECK(quadruple_coboundary(fixtures::sphere_charge(2)) == 0.0);  // no quadruple overlap
}

TEST_CASE("equivalence check") {
    const auto c1 = fixtures::sphere_charge(1.0);
    const std::vector<OverlapFunction> one(3, OverlapFunction::of_constant(0.0));
    CHECK(equivalence_check(c1, c1, one, 1e-9));

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-2, 2);
    const std::vector<double> phi{u(rng), u(rng), u(rng)};
    const auto c2 = c1.gauge_moved(phi);
    std::vector<OverlapFunction> lam;
    for (auto v : phi) lam.push_back(OverlapFunction::of_constant(v));
    CHECK(equivalence_check(c1, c2, lam, 1e-9));
    CHECK_FALSE(equivalence_check(c1, c2, one, 1e-9));

    // sampled lambda: c2_ij = c1_ij + g_i - g_j with parameter-dependent g
    std::vector<std::vector<double>> g(3, std::vector<double>(c1.sample_count()));
    for (auto& gi : g)
        for (auto& v : gi) v = u(rng);
    CechCover c3(3, c1.sample_count());
    for (auto [i, j] : c1.overlaps()) {
        std::vector<double> q(c1.sample_count());
        for (std::size_t s = 0; s < q.size(); ++s) q[s] = c1.exponent(i, j, s) + g[i][s] - g[j][s];
        c3.set_exponent(i, j, OverlapFunction::of_samples(q));
    }
    std::vector<OverlapFunction> lam3;
    for (auto& gi : g) lam3.push_back(OverlapFunction::of_samples(gi));
    CHECK(equivalence_check(c1, c3, lam3, 1e-9));

    // symmetry and transitivity on the family {c1, c2, c3}
    std::vector<OverlapFunction> inv, compose;
    for (std::size_t i = 0; i < 3; ++i) {
        inv.push_back(OverlapFunction::of_constant(-phi[i]));
        std::vector<double> gc(c1.sample_count());
        for (std::size_t s = 0; s < gc.size(); ++s) gc[s] = g[i][s] - phi[i];
        compose.push_back(OverlapFunction::of_samples(gc));
    }
    CHECK(equivalence_check(c2, c1, inv, 1e-9));
    CHECK(equivalence_check(c2, c3, compose, 1e-9));

    const auto c0 = fixtures::sphere_charge(0.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<OverlapFunction> any{OverlapFunction::of_constant(u(rng)), OverlapFunction::of_constant(u(rng)),
                                         OverlapFunction::of_constant(u(rng))};
        CHECK_FALSE(equivalence_check(c1, c0, any, 1e-6));
    }
    CHECK_THROWS_AS(equivalence_check(c1, fixtures::circle_constant(), one, 1e-9), StructureError);
}

TEST_CASE("torsor test: shifts differing by a potential are equivalent") {
    const auto c = fixtures::circle_constant();
    std::map<std::pair<std::size_t, std::size_t>, double> x1{{{0, 1}, 0.1}, {{1, 2}, 0.2}, {{0, 2}, 0.3}};
    const double ci[3] = {0.7, -1.2, 0.05};
    auto x2 = x1;
    for (auto& [e, v] : x2) v += ci[e.first] - ci[e.second];
    x2[{1, 2}] += 3.0;  // integers are invisible
    CHECK(same_torsor_class(c, x1, x2, 1e-9));
    auto x3 = x1;
    x3[{0, 1}] += 0.3;
    CHECK_FALSE(same_torsor_class(c, x1, x3, 1e-9));
}

TEST_CASE("cover files round-trip, sampled overlaps via CSV") {
    const auto dir = scratch_dir("cech_roundtrip");
    const auto c = fixtures::sphere_charge(2.0, 32);
    save_cover(c, (dir / "sphere.cover").string());
    const auto back = load_cover((dir / "sphere.cover").string());
    CHECK(back.set_count() == 3);
    CHECK(back.sample_count() == 32);
    CHECK(back.overlaps() == c.overlaps());
    for (auto [i, j] : c.overlaps())
        for (std::size_t s = 0; s < 32; ++s) {
            const double a = c.exponent(i, j, s), b = back.exponent(i, j, s);
            CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
        }
    CHECK(integrality_class(back, 1e-6).total_integer() == 2);

    {
        std::ofstream f(dir / "circle.cover");
        f << "# three arcs\nsets 3\n0 1 : 0\n1 2 : 0\n0 2 : -1\ntriple 0 1 2\n";
    }
    CHECK(integrality_class(load_cover((dir / "circle.cover").string()), 1e-9).total_integer() == 1);

    {
        std::ofstream f(dir / "bad.cover");
        f << "sets 3\n0 1 0\n";
    }
    CHECK_THROWS_AS(load_cover((dir / "bad.cover").string()), ValidationError);
    {
        std::ofstream f(dir / "dup.cover");
        f << "sets 2\n0 1 : 0.5\n1 0 : -0.5\n";
    }
    CHECK_THROWS_AS(load_cover((dir / "dup.cover").string()), ValidationError);
    {
        std::ofstream f(dir / "badcsv.cover");
        f << "sets 2\nsamples 4\n0 1 : missing.csv\n";
    }
    CHECK_THROWS_AS(load_cover((dir / "badcsv.cover").string()), ValidationError);
}
