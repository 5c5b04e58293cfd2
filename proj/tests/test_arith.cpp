#include <catch2/catch_amalgamated.hpp>

#include "fiberlab/arith.hpp"

using namespace fiberlab;

TEST_CASE("factorize on hand-checked values") {
    auto f = factorize(360);
    REQUIRE(f.sign == 1);
    REQUIRE(f.factors == std::vector<std::pair<Int, unsigned long>>{{2, 3}, {3, 2}, {5, 1}});
    REQUIRE(f.omega() == 3);
    REQUIRE(f.reconstruct() == 360);

    auto g = factorize(-12);
    REQUIRE(g.sign == -1);
    REQUIRE(g.factors == std::vector<std::pair<Int, unsigned long>>{{2, 2}, {3, 1}});
    REQUIRE(g.reconstruct() == -12);

    auto one = factorize(1);
    REQUIRE(one.factors.empty());
    REQUIRE(one.omega() == 0);
    REQUIRE(one.reconstruct() == 1);

    REQUIRE_THROWS_AS(factorize(0), ZeroInput);
}

TEST_CASE("factorize round-trips on a mixed corpus") {
    std::vector<Int> corpus;
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) corpus.emplace_back(static_cast<long>(rng.below(1'000'000)) + 2);
    for (int i = 0; i < 40; ++i) {
        Int v = Int(static_cast<long>(rng.below(1'000'000)) + 2) *
                Int(static_cast<long>(rng.below(1'000'000)) + 2);
        corpus.push_back(rng.coin() ? v : -v);
    }
    corpus.push_back(pow2(61) - 1);                  // Mersenne prime
    corpus.push_back((pow2(31) - 1) * (pow2(31) - 1));
    corpus.push_back(int_pow(Int(999983), 2));       // square of a large sieve prime
    for (const auto& n : corpus) {
        auto f = factorize(n);
        REQUIRE(f.reconstruct() == n);
        for (std::size_t i = 0; i < f.factors.size(); ++i) {
            REQUIRE(is_prime(f.factors[i].first));
            if (i > 0) REQUIRE(f.factors[i - 1].first < f.factors[i].first);
            REQUIRE(f.factors[i].second >= 1);
        }
    }
}

TEST_CASE("factorize rejects oversized composites") {
    Int hard = (pow2(61) - 1) * (pow2(89) - 1);  // 150-bit semiprime, no small factors
    REQUIRE_THROWS_AS(factorize(hard), FactorizationTooHard);
    FactorizeOptions generous;
    generous.bound = pow2(160);
    auto f = factorize(hard, generous);
    REQUIRE(f.omega() == 2);
    REQUIRE(f.reconstruct() == hard);
}

TEST_CASE("omega") {
    REQUIRE(omega(12) == 2);
    REQUIRE(omega(30) == 3);
    REQUIRE(omega(1) == 0);
    REQUIRE(omega(-1) == 0);
    REQUIRE_THROWS_AS(omega(0), ZeroInput);

    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        Int m(static_cast<long>(rng.below(5000)) + 1);
        Int n(static_cast<long>(rng.below(5000)) + 1);
        REQUIRE(omega(m * n) <= omega(m) + omega(n));
        if (gcd(m, n) == 1) REQUIRE(omega(m * n) == omega(m) + omega(n));
    }
}

TEST_CASE("valuation") {
    REQUIRE(valuation(48, 2) == 4);
    REQUIRE(valuation(48, 5) == 0);
    REQUIRE(valuation(-18, 3) == 2);
    REQUIRE_THROWS_AS(valuation(0, 2), ZeroInput);

    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        Int m(static_cast<long>(rng.below(100000)) + 1);
        Int n(static_cast<long>(rng.below(100000)) + 1);
        Int p(std::vector<long>{2, 3, 5, 7}[rng.below(4)]);
        REQUIRE(valuation(m * n, p) == valuation(m, p) + valuation(n, p));
    }
}

TEST_CASE("prime tuples") {
    PrimeTuple p({Int(3), Int(2)});
    REQUIRE(p.primes() == std::vector<Int>{2, 3});
    REQUIRE(p.rank() == 2);
    REQUIRE_THROWS_AS(PrimeTuple({Int(2), Int(2)}), BadParameter);
    REQUIRE_THROWS_AS(PrimeTuple({Int(4)}), BadParameter);
    REQUIRE(p.valuations(12) == std::vector<unsigned long>{2, 1});
    REQUIRE(p.coprime_part(12) == 1);
    REQUIRE(p.coprime_part(-45) == -5);
}

TEST_CASE("group membership") {
    PrimeTuple p23({Int(2), Int(3)});
    REQUIRE(group_membership(Rat(18), p23, MembershipMode::semigroup));
    REQUIRE_FALSE(group_membership(Rat(20), p23, MembershipMode::group));
    REQUIRE(group_membership(Rat(-12), p23, MembershipMode::signed_group));
    REQUIRE(group_membership(make_rat(3, 2), p23, MembershipMode::group));
    REQUIRE_FALSE(group_membership(make_rat(3, 2), p23, MembershipMode::semigroup));
    REQUIRE_FALSE(group_membership(Rat(-12), p23, MembershipMode::group));
    REQUIRE_THROWS_AS(group_membership(Rat(0), p23, MembershipMode::group), ZeroInput);

    // closure under products, per mode
    Rng rng(13);
    auto random_member = [&](MembershipMode mode) {
        long e2 = rng.range(mode == MembershipMode::semigroup ? 0 : -4, 4);
        long e3 = rng.range(mode == MembershipMode::semigroup ? 0 : -4, 4);
        Rat v = monomial(p23, {e2, e3});
        if (mode == MembershipMode::signed_group && rng.coin()) v = -v;
        return v;
    };
    for (auto mode : {MembershipMode::group, MembershipMode::semigroup,
                      MembershipMode::signed_group}) {
        for (int i = 0; i < 50; ++i) {
            Rat x = random_member(mode);
            Rat y = random_member(mode);
            REQUIRE(group_membership(x, p23, mode));
            REQUIRE(group_membership(y, p23, mode));
            REQUIRE(group_membership(x * y, p23, mode));
        }
    }
}

TEST_CASE("monomial") {
    PrimeTuple p23({Int(2), Int(3)});
    REQUIRE(monomial(p23, {2, 1}) == Rat(12));
    REQUIRE(monomial(p23, {0, 0}) == Rat(1));
    PrimeTuple p25({Int(2), Int(5)});
    REQUIRE(monomial(p25, {-1, 1}) == make_rat(5, 2));
    REQUIRE_THROWS_AS(monomial(p23, {1}), DimensionMismatch);
}

TEST_CASE("sunit reference bound") {
    REQUIRE(sunit_reference_bound(1, 1) == 262144);
    REQUIRE(sunit_reference_bound(1, 0) == 32768);

    // 16^19 by independent repeated squaring
    Int sixteen19 = 16;
    Int acc = 1;
    unsigned long e = 19;
    Int base = 16;
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    REQUIRE(sunit_reference_bound(2, 1) == acc);
    REQUIRE_THROWS_AS(sunit_reference_bound(0, 1), BadParameter);
}
