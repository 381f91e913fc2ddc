#include <gtest/gtest.h>

#include "flow_oracle.hpp"
#include "saddlenf/flyby.hpp"
#include "saddlenf/io.hpp"

using namespace saddlenf;

namespace {

const std::string kData = SADDLENF_DATA_DIR;

const Certificate& ex2() {
  static const Certificate c =
      certify(to_diag(load_field(kData + "/ex2_field.txt")), load_config(kData + "/ex2_config.txt"));
  return c;
}

const Certificate& ex1() {
  static const Certificate c =
      certify(to_diag(load_field(kData + "/ex1_field.txt")), load_config(kData + "/ex1_config.txt"));
  return c;
}

const Certificate& linear() {
  static const Certificate c = certify(make_diag_field({Interval(-2.2), Interval(1.8)}, {}), HeuristicConfig{});
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ExitEnclosure, SymmetricLinearSaddle) {
  Certificate c;
  c.field.spectrum = {Interval(-1.0), Interval(1.0)};
  c.kappa = Interval(0.0);
  const Interval R(0.01);
  const Interval y_u = R / exp(Interval(1.0));
  const ExitEnclosure ex = exit_enclosure(c, R, y_u, R);
  EXPECT_TRUE(ex.y_s.contains(0.01 / std::exp(1.0)));
  EXPECT_TRUE(ex.time.contains(1.0));
  EXPECT_LT(ex.time.width(), 1e-14);
  // Close to the face the passage time goes to zero.
  const ExitEnclosure near = exit_enclosure(c, R, Interval(0.01 * (1 - 1e-9)), R);
  EXPECT_LT(near.time.hi(), 2e-9);
  EXPECT_EQ(kind_of([&] { (void)exit_enclosure(c, R, R, R); }), ErrorKind::DomainError);
}

TEST(Flyby, LinearLimitMatchesExactFormulas) {
  const Certificate& c = linear();
  ASSERT_EQ(c.K0, Interval(0.0));
  const double r = std::min(0.01, c.r3.lo());
  for (double xu : {1e-6, 1e-4, 3e-3, 0.5 * r}) {
    const FlybyResult f = flyby(c, {Interval(r), Interval(xu), Interval(r)});
    const double ys = r * std::pow(xu / r, 2.2 / 1.8);
    const double t = std::log(r / xu) / 1.8;
    EXPECT_NEAR(f.x_s_exit.mid(), ys, 1e-12 * ys);
    EXPECT_NEAR(f.time.mid(), t, 1e-12);
    EXPECT_LT(f.x_s_exit.width(), 1e-12);
    EXPECT_LT(f.time.width(), 1e-12);
    EXPECT_EQ(f.exit_side, 1);
  }
}

TEST(Flyby, MonotoneInEntryDistance) {
  const Certificate& c = ex2();
  const Interval r(0.02);
  double last_time = 1e300, last_xs = 0;
  for (double xu : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2}) {
    const FlybyResult f = flyby(c, {r, Interval(xu), r});
    EXPECT_LT(f.time.mid(), last_time);
    EXPECT_GT(f.x_s_exit.mid(), last_xs);
    EXPECT_GT(f.time.lo(), 0.0);
    last_time = f.time.mid();
    last_xs = f.x_s_exit.mid();
  }
}

TEST(Flyby, SignsFollowTheEntryPoint) {
  const Certificate& c = ex2();
  const Interval r(0.02);
  const FlybyResult a = flyby(c, {-r, Interval(-0.005), r});
  EXPECT_EQ(a.exit_side, -1);
  EXPECT_TRUE(a.x_s_exit.certainly_negative());
  EXPECT_EQ(a.x_u_exit, -r);
  for (const auto& e : a.audit) EXPECT_TRUE(e.passed) << e.name;
}

TEST(Flyby, Errors) {
  const Certificate& c = ex2();
  const Interval r(0.02);
  EXPECT_EQ(kind_of([&] { (void)flyby(c, {r, Interval(0.0), r}); }), ErrorKind::StraddlesStableManifold);
  EXPECT_EQ(kind_of([&] { (void)flyby(c, {r, Interval(-1e-3, 1e-3), r}); }), ErrorKind::StraddlesStableManifold);
  EXPECT_EQ(kind_of([&] { (void)flyby(c, {Interval(0.5), Interval(0.1), Interval(0.5)}); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { (void)flyby(c, {Interval(0.01), Interval(1e-3), r}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { (void)flyby(c, {r, Interval(0.03), r}); }), ErrorKind::InvalidArgument);
}

TEST(Chart, ModeFollowsAxisInvariance) {
  EXPECT_TRUE(axes_invariant(ex2().field));
  EXPECT_FALSE(axes_invariant(ex1().field));
  const Chart ch(ex2());
  const Polydisc p = ch.preimage(0.02, 0.01);
  EXPECT_GT(p.s, 0.02);
  EXPECT_GT(p.u, 0.01);
  EXPECT_LT(p.radius(), 0.0215);
  // The relative error at entry is far below K0 rho.
  EXPECT_LT(ch.bound(Component::u, p), (ex2().K0 * Interval(p.radius())).lo());
}

// Non-rigorous cross-check against adaptive integration of the field.
TEST(Flyby, EnclosesIntegratedOrbits) {
  for (const Certificate* c : {&ex2(), &ex1()}) {
    const saddlenf_test::MidpointField field(c->field);
    const double r = c == &ex2() ? 0.02 : 0.9 * c->r3.lo();
    for (double frac : {0.3, 0.6, 0.9}) {
      const double xu = frac * r;
      FlybyResult f;
      try {
        f = flyby(*c, {Interval(r), Interval(xu), Interval(r)});
      } catch (const Error& e) {
        // The additive chart cannot separate small x_u from the stable manifold.
        EXPECT_EQ(e.kind(), ErrorKind::StraddlesStableManifold);
        continue;
      }
      const auto sim = saddlenf_test::simulate_exit(field, r, xu, r);
      ASSERT_TRUE(sim.exited);
      EXPECT_TRUE(f.x_s_exit.contains(sim.x_s)) << f.x_s_exit << " vs " << sim.x_s;
      EXPECT_TRUE(f.time.contains(sim.time)) << f.time << " vs " << sim.time;
    }
  }
}

TEST(Laps, DistanceToGraphicDecreases) {
  const LapTable t = graphic_laps(ex2(), Interval(0.02), 0.01, 6);
  ASSERT_EQ(t.rows.size(), 7u);
  EXPECT_TRUE(t.stop_reason.empty());
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LT(t.rows[i].x_u_upper, t.rows[i - 1].x_u_upper);
    EXPECT_GT(t.rows[i].lap_time_lower, t.rows[i - 1].lap_time_lower);
    EXPECT_NEAR(t.rows[i].cumulative_time_lower, t.rows[i - 1].cumulative_time_lower + t.rows[i].lap_time_lower,
                1e-9);
  }
  EXPECT_LT(t.rows[6].x_u_upper, 1e-16);
}

TEST(Laps, StopsWithReason) {
  const LapTable t = graphic_laps(ex2(), Interval(0.02), 0.0, 3);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_NE(t.stop_reason.find("StraddlesStableManifold"), std::string::npos);
  EXPECT_THROW(graphic_laps(ex2(), Interval(0.02), 0.01, -1), Error);
}
