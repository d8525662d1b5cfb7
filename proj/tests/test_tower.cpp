#include <gtest/gtest.h>

#include <random>

#include "quasilin/tower.hpp"

using quasilin::FieldTower;
using quasilin::Poly2;
using quasilin::RatFunc;
using quasilin::TowerElement;

namespace {

TowerElement random_element(std::mt19937_64& rng, const FieldTower& f) {
  quasilin::detail::Coords c(f.degree());
  for (auto& x : c) {
    if (rng() % 3 == 0) continue;
    std::vector<quasilin::Monomial> terms;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 3); ++k) {
      quasilin::Monomial m;
      for (std::size_t v = 0; v < f.num_variables(); ++v) m.set_exponent(v, static_cast<unsigned>(rng() % 3));
      terms.push_back(m);
    }
    Poly2 den = Poly2::one();
    if (rng() % 4 == 0) den = Poly2::variable(rng() % f.num_variables()) + Poly2::one();
    x = RatFunc(Poly2::from_terms(terms), den);
  }
  return f.from_coords(std::move(c));
}

}  // namespace

TEST(Tower, RootSquaresToRadicand) {
  const FieldTower k = FieldTower::rational({"t1"});
  const FieldTower l = k.adjoin_root_unchecked("r1", k.variable(0));
  EXPECT_EQ(l.degree(), 2U);
  const TowerElement r = l.root(0);
  EXPECT_EQ(r.squared(), l.variable(0));
  EXPECT_EQ(r * r, l.variable(0));
  const TowerElement one_r = l.one() + r;
  EXPECT_EQ(one_r * one_r, l.one() + l.variable(0));
  const TowerElement inv = one_r.inverse();
  EXPECT_EQ(inv, one_r * (l.one() + l.variable(0)).inverse());
  EXPECT_TRUE((inv * one_r).is_one());
}

TEST(Tower, InverseIsExactOnRandomElements) {
  const FieldTower k = FieldTower::rational({"t1", "t2", "t3"});
  const FieldTower l1 = k.adjoin_root_unchecked("r1", k.variable(0));
  const FieldTower l2 = l1.adjoin_root_unchecked("r2", l1.variable(1) + l1.root(0));
  const FieldTower l3 = l2.adjoin_transcendentals({"X1"});
  EXPECT_EQ(l3.degree(), 4U);
  EXPECT_EQ(l2.root(1).squared(), l2.variable(1) + l2.root(0));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const TowerElement x = random_element(rng, l3);
    if (x.is_zero()) continue;
    ASSERT_TRUE((x.inverse() * x).is_one()) << x.to_string();
    const TowerElement y = random_element(rng, l3);
    ASSERT_EQ((x + y).squared(), x.squared() + y.squared());
    const auto& sq = x.squared().coords();
    for (std::size_t e = l3.degree() / 2; e < l3.degree(); ++e) ASSERT_TRUE(sq[e].is_zero());
    ASSERT_EQ((x * y) * x, x * (y * x));
  }
}

TEST(Tower, EmbeddingAndMixedFields) {
  const FieldTower k = FieldTower::rational({"t1"});
  const FieldTower l = k.adjoin_root_unchecked("r1", k.variable(0));
  const FieldTower e = l.adjoin_transcendentals({"X1", "X2"});
  EXPECT_THROW((void)(k.variable(0) + l.root(0)), quasilin::MixedField);
  EXPECT_EQ(e.embed(k.variable(0)) + e.root(0), e.embed(k.variable(0) + k.one()) +
                                                     e.one() + e.root(0));
  EXPECT_THROW((void)k.embed(l.root(0)), quasilin::MixedField);
  EXPECT_THROW((void)l.adjoin_transcendentals({"t1"}), quasilin::NameCollision);
  EXPECT_THROW((void)l.adjoin_root_unchecked("X", l.zero()), quasilin::ZeroRadicand);
  EXPECT_TRUE(l.adjoin_transcendentals({}) == l);
}

TEST(Tower, DescriptorListsConstructionOrder) {
  const FieldTower k = FieldTower::rational({"t1", "t2"});
  const FieldTower l = k.adjoin_root_unchecked("r1", k.variable(0))
                           .adjoin_transcendentals({"X1"});
  const FieldTower m = l.adjoin_root_unchecked("r2", l.variable(2) * l.root(0) + l.variable(1));
  EXPECT_EQ(m.descriptor(),
            "field GF2(t1, t2)\n"
            "adjoin r1 = sqrt(t1)\n"
            "adjoin var X1\n"
            "adjoin r2 = sqrt(t2 + X1*r1)\n");
}
