#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fvn/channel.hpp"

using namespace fvn;

TEST_CASE("advance_positions: linear motion, wrap-around, stationary") {
  std::vector<VehicleState> vs(3);
  vs[0].position = {0.0, 0.0};
  vs[0].velocity = {1.0, 0.0};
  vs[1].position = {9.5, 0.0};
  vs[1].velocity = {1.0, 0.0};
  vs[2].position = {3.0, 4.0};
  vs[2].velocity = {0.0, 0.0};
  for (int i = 0; i < 3; ++i) vs[static_cast<std::size_t>(i)].id = i;

  auto out = advance_positions(vs, 1.0, 10.0);
  CHECK(out[0].position.x() == doctest::Approx(1.0));
  CHECK(out[0].position.y() == doctest::Approx(0.0));
  CHECK(out[1].position.x() == doctest::Approx(0.5));
  CHECK(out[2].position == vs[2].position);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[static_cast<std::size_t>(i)].id == i);
    CHECK(out[static_cast<std::size_t>(i)].velocity ==
          vs[static_cast<std::size_t>(i)].velocity);
  }
  CHECK_THROWS_AS(advance_positions(vs, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(advance_positions(vs, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("positions stay inside the arena under long runs") {
  std::vector<VehicleState> vs(1);
  vs[0].position = {1999.0, 1999.0};
  vs[0].velocity = {17.3, -9.1};
  for (int step = 0; step < 1000; ++step) {
    vs = advance_positions(vs, 1.0, 2000.0);
    CHECK(vs[0].position.x() >= 0.0);
    CHECK(vs[0].position.x() < 2000.0);
    CHECK(vs[0].position.y() >= 0.0);
    CHECK(vs[0].position.y() < 2000.0);
  }
}

TEST_CASE("gain sampling clamps short distances") {
  Rng a(7), b(7);
  double g_near = sample_channel_gain(0.1, 3.0, a);
  double g_min = sample_channel_gain(1.0, 3.0, b);
  CHECK(g_near == g_min);
}

TEST_CASE("gain mean matches the pathloss law") {
  Rng rng(21);
  const int n = 1000000;
  double sum1 = 0.0;
  for (int i = 0; i < n; ++i) sum1 += sample_channel_gain(1.0, 3.0, rng);
  double mean1 = sum1 / n;
  CHECK(mean1 == doctest::Approx(1.0).epsilon(0.01));

  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) sum2 += sample_channel_gain(2.0, 3.0, rng);
  double mean2 = sum2 / n;
  CHECK(mean1 / mean2 == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("gain mean at fixed distance within three standard errors") {
  Rng rng(22);
  const int n = 100000;
  const double d = 37.0, alpha = 3.0;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = sample_channel_gain(d, alpha, rng);
    CHECK(g > 0.0);
    sum += g;
    sumsq += g * g;
  }
  double mean = sum / n;
  double expected = std::pow(d, -alpha);
  double se = std::sqrt((sumsq / n - mean * mean) / n);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("snapshot ties received power to budget and gain") {
  Rng fleet_rng(3);
  auto fleet = make_fleet(12, 2000.0, 0.1, 1.0, 5.0, 20.0, fleet_rng);
  Eigen::Vector2d bs(1000.0, 1000.0);
  Rng rng(4);
  ChannelSnapshot snap = snapshot(fleet, bs, 1e-13, 3.0, rng);
  REQUIRE(snap.gains.size() == 12);
  REQUIRE(snap.p_r_max.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(snap.gains[i] > 0.0);
    // Exact equality of the stored values, not approximate.
    CHECK(snap.p_r_max[i] == fleet[static_cast<std::size_t>(i)].p_t_max * snap.gains[i]);
  }
}

TEST_CASE("identical seeds give bit-identical snapshots") {
  Rng fleet_rng(5);
  auto fleet = make_fleet(20, 2000.0, 0.1, 1.0, 5.0, 20.0, fleet_rng);
  Eigen::Vector2d bs(1000.0, 1000.0);
  Rng r1(99), r2(99);
  ChannelSnapshot a = snapshot(fleet, bs, 1e-13, 3.0, r1, 7);
  ChannelSnapshot b = snapshot(fleet, bs, 1e-13, 3.0, r2, 7);
  CHECK(a.slot == b.slot);
  CHECK(a.gains == b.gains);
  CHECK(a.p_r_max == b.p_r_max);
}

TEST_CASE("make_fleet respects configured ranges") {
  Rng rng(6);
  auto fleet = make_fleet(200, 1500.0, 0.2, 0.9, 5.0, 20.0, rng);
  for (const auto& v : fleet) {
    CHECK(v.p_t_max >= 0.2);
    CHECK(v.p_t_max <= 0.9);
    CHECK(v.position.x() >= 0.0);
    CHECK(v.position.x() < 1500.0);
    double speed = v.velocity.norm();
    CHECK(speed >= doctest::Approx(5.0));
    CHECK(speed <= doctest::Approx(20.0));
  }
}
