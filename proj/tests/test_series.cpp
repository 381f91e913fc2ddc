#include <gtest/gtest.h>

#include "saddlenf/series.hpp"

using namespace saddlenf;

namespace {

Series2 poly(int degree, std::initializer_list<std::pair<MultiIndex, double>> terms) {
  Series2 s(degree);
  for (const auto& [m, c] : terms) s.at(m) = Interval(c);
  return s;
}

}  // namespace

TEST(TruncatedSeries2, StorageAndDefaults) {
  Series2 s(3);
  EXPECT_EQ(s.degree(), 3);
  EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(s.valuation(), 4);
  s.at({1, 2}) = Interval(5.0);
  EXPECT_EQ((s[MultiIndex{1, 2}]), Interval(5.0));
  EXPECT_EQ(s.coeff({4, 0}), Interval(0.0));
  EXPECT_THROW(s.at({3, 1}), Error);
  EXPECT_THROW(Series2(-1), Error);
  EXPECT_EQ(s.valuation(), 3);
}

TEST(TruncatedSeries2, ProductTruncates) {
  // (1 + x_s)(1 - x_s) = 1 - x_s^2, and (x_s + x_u)^2 has the binomial row.
  const auto a = poly(2, {{{0, 0}, 1}, {{1, 0}, 1}});
  const auto b = poly(2, {{{0, 0}, 1}, {{1, 0}, -1}});
  const auto p = a * b;
  EXPECT_EQ((p[MultiIndex{0, 0}]), Interval(1.0));
  EXPECT_EQ((p[MultiIndex{1, 0}]), Interval(0.0));
  EXPECT_EQ((p[MultiIndex{2, 0}]), Interval(-1.0));

  const auto x = poly(4, {{{1, 0}, 1}, {{0, 1}, 1}});
  const auto x4 = x * x * x * x;
  EXPECT_EQ((x4[MultiIndex{2, 2}]), Interval(6.0));
  EXPECT_EQ((x4[MultiIndex{1, 3}]), Interval(4.0));
  // Nothing beyond the common degree is created.
  const auto low = poly(1, {{{1, 0}, 1}});
  EXPECT_EQ((low * x4).degree(), 1);
}

TEST(TruncatedSeries2, Filters) {
  auto s = Series2(6);
  s.for_each([](const MultiIndex&, const Interval&) {});
  for (int k = 0; k <= 6; ++k) {
    for (int mu = 0; mu <= k; ++mu) s.at({k - mu, mu}) = Interval(1.0);
  }
  const auto v = filter(s, 2, FilterSet::V);
  const auto u = filter(s, 2, FilterSet::U);
  EXPECT_EQ((v[MultiIndex{1, 1}]), Interval(1.0));
  EXPECT_EQ((v[MultiIndex{2, 2}]), Interval(0.0));
  EXPECT_EQ((u[MultiIndex{2, 2}]), Interval(1.0));
  EXPECT_EQ((u[MultiIndex{3, 1}]), Interval(0.0));
  // Orders below 2 belong to neither set.
  EXPECT_EQ((v[MultiIndex{1, 0}]), Interval(0.0));
  EXPECT_EQ((u[MultiIndex{0, 0}]), Interval(0.0));
  // Every order >= 2 coefficient lands in exactly one of the two.
  (v + u).for_each([](const MultiIndex& m, const Interval& c) {
    EXPECT_EQ(c, Interval(m.order() >= 2 ? 1.0 : 0.0));
  });
  EXPECT_THROW(filter(s, 0, FilterSet::V), Error);
}

TEST(TruncatedSeries2, ComposeShift) {
  // f = x_s x_u, phi = (x_u^2, 0): f(x + phi) = x_s x_u + x_u^3.
  const auto f = poly(4, {{{1, 1}, 1}});
  SeriesPair<Interval> phi{poly(4, {{{0, 2}, 1}}), Series2(4)};
  const auto g = compose_shift(f, phi, 4);
  EXPECT_EQ((g[MultiIndex{1, 1}]), Interval(1.0));
  EXPECT_EQ((g[MultiIndex{0, 3}]), Interval(1.0));
  EXPECT_EQ((g[MultiIndex{2, 0}]), Interval(0.0));

  SeriesPair<Interval> linear{poly(4, {{{1, 0}, 1}}), Series2(4)};
  EXPECT_THROW(compose_shift(f, linear, 4), Error);
}

TEST(MajorantSeries1, CollapseTakesComponentwiseMaximum) {
  const auto as = poly(3, {{{2, 0}, -3}, {{1, 1}, 1}, {{0, 3}, 0.5}});
  const auto au = poly(3, {{{2, 0}, 1}, {{1, 1}, -2}});
  const auto m = majorant_collapse(as, au);
  EXPECT_EQ(m[2], Interval(5.0));  // max(3,1) + max(1,2)
  EXPECT_EQ(m[3], Interval(0.5));
  EXPECT_EQ(m[7], Interval(0.0));  // beyond the degree
  EXPECT_THROW(majorant_collapse(as, Series2(2)), Error);
}

TEST(MajorantSeries1, AlgebraAndCompose) {
  MajorantSeries1 a(3);
  a.set(1, Interval(1.0));
  a.set(2, Interval(2.0));
  EXPECT_THROW(a.set(1, Interval(-1.0)), Error);
  EXPECT_THROW(a.set(9, Interval(1.0)), Error);
  const auto d = a.derivative();
  EXPECT_EQ(d[0], Interval(1.0));
  EXPECT_EQ(d[1], Interval(4.0));
  // f(w) with f = t^2 and w = t + 2 t^2: t^2 + 4 t^3 + ...
  MajorantSeries1 f(2);
  f.set(2, Interval(1.0));
  const auto c = f.compose(a, 4);
  EXPECT_EQ(c[2], Interval(1.0));
  EXPECT_EQ(c[3], Interval(4.0));
  EXPECT_EQ(c[4], Interval(4.0));
}
