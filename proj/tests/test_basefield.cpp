#include <gtest/gtest.h>

#include <random>

#include "quasilin/ratfunc.hpp"

using quasilin::Monomial;
using quasilin::Poly2;
using quasilin::RatFunc;

namespace {

Poly2 t(std::size_t i, unsigned e = 1) { return Poly2::variable(i, e); }
const Poly2 one = Poly2::one();

Poly2 random_poly(std::mt19937_64& rng, std::size_t vars, unsigned max_deg, std::size_t max_terms) {
  std::vector<Monomial> terms;
  const std::size_t n = 1 + rng() % max_terms;
  for (std::size_t k = 0; k < n; ++k) {
    Monomial m;
    for (std::size_t v = 0; v < vars; ++v) m.set_exponent(v, static_cast<unsigned>(rng() % (max_deg + 1)));
    terms.push_back(m);
  }
  return Poly2::from_terms(std::move(terms));
}

Poly2 random_nonzero(std::mt19937_64& rng, std::size_t vars, unsigned max_deg, std::size_t max_terms) {
  Poly2 p;
  while (p.is_zero()) p = random_poly(rng, vars, max_deg, max_terms);
  return p;
}

}  // namespace

TEST(Poly2, CharacteristicTwo) {
  const Poly2 p = t(0) + t(1, 2) + one;
  EXPECT_TRUE((p + p).is_zero());
  const Poly2 q = t(0) * t(1) + t(2);
  EXPECT_EQ((p + q).squared(), p.squared() + q.squared());
  EXPECT_EQ((p + q) * (p + q), p.squared() + q.squared());
}

TEST(Poly2, PrintsCanonically) {
  const std::vector<std::string> names{"t1", "t2"};
  EXPECT_EQ((t(0, 2) * t(1) + one + t(1)).to_string(names), "t1^2*t2 + t2 + 1");
  EXPECT_EQ(Poly2{}.to_string(names), "0");
}

TEST(Poly2, GcdExamples) {
  EXPECT_EQ(quasilin::gcd(t(0, 2) + t(0), t(0)), t(0));
  const Poly2 p = t(0) * t(1) + one;
  EXPECT_EQ(quasilin::gcd(p, Poly2{}), p);
  const Poly2 g = quasilin::gcd(t(0, 2) * t(1) + t(1, 3), t(0) + t(1));
  EXPECT_EQ(g, t(0) + t(1));
  // Exact-division oracle: (t1^2 + t2^2) t2 = (t1 + t2)^2 t2.
  EXPECT_EQ(Poly2::divide_exact(t(0, 2) * t(1) + t(1, 3), g), (t(0) + t(1)) * t(1));
}

TEST(Poly2, GcdDividesAndRecoversCommonFactor) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const Poly2 c = random_nonzero(rng, 3, 2, 3);
    const Poly2 a = random_nonzero(rng, 3, 2, 3) * c;
    const Poly2 b = random_nonzero(rng, 3, 2, 3) * c;
    const Poly2 g = quasilin::gcd(a, b);
    ASSERT_TRUE(Poly2::divide_exact(a, g).has_value()) << trial;
    ASSERT_TRUE(Poly2::divide_exact(b, g).has_value()) << trial;
    ASSERT_TRUE(Poly2::divide_exact(g, c).has_value()) << trial;
    // The cofactors are coprime.
    const Poly2 ca = *Poly2::divide_exact(a, g);
    const Poly2 cb = *Poly2::divide_exact(b, g);
    ASSERT_TRUE(quasilin::gcd(ca, cb).is_one()) << trial;
  }
}

TEST(Poly2, DivideExactRejectsNonMultiples) {
  EXPECT_FALSE(Poly2::divide_exact(t(0) + one, t(0)).has_value());
  EXPECT_FALSE(Poly2::divide_exact(t(0, 2) + t(1), t(0) + one).has_value());
  EXPECT_EQ(Poly2::divide_exact(t(0, 2) + one, t(0) + one), t(0) + one);
}

TEST(RatFunc, ArithmeticExamples) {
  const RatFunc x = RatFunc(t(0), t(0) + one) + RatFunc(one, t(0) + one);
  EXPECT_TRUE(x.is_one());
  const RatFunc inv = RatFunc(t(0, 2)).inverse();
  EXPECT_EQ(inv.num(), one);
  EXPECT_EQ(inv.den(), t(0, 2));
  EXPECT_THROW(RatFunc{}.inverse(), quasilin::InvalidOperand);
  EXPECT_THROW(RatFunc(one, Poly2{}), quasilin::InvalidOperand);
}

TEST(RatFunc, ZeroIsCanonical) {
  const RatFunc a(t(0), t(1) + one);
  const RatFunc z = a + a;
  EXPECT_TRUE(z.is_zero());
  EXPECT_TRUE(z.den().is_one());
  EXPECT_EQ(z, RatFunc{});
}

TEST(RatFunc, FieldPropertiesOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const RatFunc a(random_poly(rng, 3, 2, 3), random_nonzero(rng, 3, 2, 3));
    const RatFunc b(random_poly(rng, 3, 2, 3), random_nonzero(rng, 3, 2, 3));
    ASSERT_EQ((a + b).squared(), a.squared() + b.squared());
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a + b) * a, a * a + b * a);
    if (!a.is_zero()) {
      ASSERT_TRUE((a * a.inverse()).is_one());
    }
    // Normalization is idempotent and reduced.
    ASSERT_EQ(RatFunc(a.num(), a.den()), a);
    ASSERT_TRUE(quasilin::gcd(a.num(), a.den()).is_one() || a.is_zero());
  }
}

TEST(Frobenius, Examples) {
  auto s = quasilin::frobenius_split(RatFunc(t(0)));
  ASSERT_EQ(s.size(), 1U);
  EXPECT_EQ(s[0].first, Monomial::variable(0));
  EXPECT_TRUE(s[0].second.is_one());

  s = quasilin::frobenius_split(RatFunc(t(0, 2) + t(0)));
  ASSERT_EQ(s.size(), 2U);
  EXPECT_TRUE(s[0].first.is_one());
  EXPECT_EQ(s[0].second, RatFunc(t(0)));
  EXPECT_EQ(s[1].first, Monomial::variable(0));
  EXPECT_TRUE(s[1].second.is_one());

  const RatFunc x(one, t(0) + t(1, 2));
  EXPECT_EQ(quasilin::recompose_frobenius(quasilin::frobenius_split(x)), x);
}

TEST(Frobenius, RoundTripUniquenessAndSquares) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const RatFunc x(random_poly(rng, 3, 3, 4), random_nonzero(rng, 3, 2, 3));
    const auto parts = quasilin::frobenius_split(x);
    ASSERT_EQ(quasilin::recompose_frobenius(parts), x);
    for (const auto& [g, c] : parts) {
      ASSERT_TRUE(g.is_square_free());
      ASSERT_FALSE(c.is_zero());
    }
    const auto sq = quasilin::frobenius_split(x.squared());
    if (x.is_zero()) {
      ASSERT_TRUE(sq.empty());
    } else {
      ASSERT_EQ(sq.size(), 1U);
      ASSERT_TRUE(sq[0].first.is_one());
      ASSERT_EQ(sq[0].second, x);
    }
    const RatFunc y(random_poly(rng, 3, 3, 4), random_nonzero(rng, 3, 2, 3));
    ASSERT_EQ(quasilin::frobenius_split(y) == parts, y == x);
  }
}
