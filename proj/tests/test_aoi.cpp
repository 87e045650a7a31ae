// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <doctest.h>

#include "simisac/aoi.hpp"
#include "simisac/rng.hpp"

using namespace simisac;

TEST_CASE("age update rules") {
  AoiState st = AoiState::initial(2);
  CHECK(st.age[0] == 0);

  SUBCASE("detecting every mini-slot pins the age at one") {
    ivec on = ivec::Ones(2);
    for (int k = 0; k < 10; ++k) {
      st = step_aoi(st, on);
      CHECK(st.age[0] == 1);
      CHECK(st.age[1] == 1);
    }
  }

  SUBCASE("never detecting counts up from one") {
    ivec off = ivec::Zero(2);
    for (int k = 1; k <= 10; ++k) {
      st = step_aoi(st, off);
      CHECK(st.age[0] == k);
    }
  }

  SUBCASE("the affine recursion reproduces the case split") {
    Rng rng(9);
    ivec age_direct = ivec::Zero(2);
    for (int k = 0; k < 200; ++k) {
      ivec det(2);
      det << (rng.uniform() < 0.4 ? 1 : 0), (rng.uniform() < 0.2 ? 1 : 0);
      st = step_aoi(st, det);
      for (int i = 0; i < 2; ++i)
        age_direct[i] = det[i] == 1 ? 1 : age_direct[i] + 1;  // case-split oracle
      CHECK(st.age == age_direct);
    }
  }

  SUBCASE("multiple detections per target are rejected") {
    ivec bad(2);
    bad << 2, 0;
    CHECK_THROWS_AS(step_aoi(st, bad), std::invalid_argument);
  }
}

TEST_CASE("virtual queue update") {
  ivec aoi_max(2);
  aoi_max << 3, 0;
  VirtualQueues q = VirtualQueues::initial(2);

  SUBCASE("slack service keeps the backlog at zero") {
    ivec age(2);
    age << 2, 0;
    for (int k = 0; k < 5; ++k) {
      q = update_virtual_queue(q, age, aoi_max);
      CHECK(q.backlog[0] == 0.0);
    }
  }

  SUBCASE("zero budget accumulates the age") {
    ivec age(2);
    age << 1, 4;
    for (int k = 1; k <= 5; ++k) {
      q = update_virtual_queue(q, age, aoi_max);
      CHECK(q.backlog[1] == doctest::Approx(4.0 * k));
    }
  }

  SUBCASE("mixed trajectory matches a scalar recurrence") {
    const int ages[5] = {4, 1, 5, 2, 6};
    double u = 0.0;
    ivec amax = ivec::Constant(1, 3);
    VirtualQueues vq = VirtualQueues::initial(1);
    for (int k = 0; k < 5; ++k) {
      ivec a = ivec::Constant(1, ages[k]);
      vq = update_virtual_queue(vq, a, amax);
      u = std::max(0.0, u + ages[k] - 3.0);
      CHECK(vq.backlog[0] == doctest::Approx(u).epsilon(1e-15));
    }
  }
}

TEST_CASE("scheduling weights") {
  VirtualQueues q = VirtualQueues::initial(2);
  AoiState st = AoiState::initial(2);
  st.age << 4, 2;

  q.backlog << 0.0, 3.0;
  CHECK(dpp_weight(q, st, 0, 2).detect_reward == 0.0);
  DppWeight w1 = dpp_weight(q, st, 1, 2);
  CHECK(w1.detect_reward == doctest::Approx(6.0));
  CHECK(w1.constant == doctest::Approx(3.0 * (1 + 2 - 2)));
  q.backlog[1] *= 2.0;
  CHECK(dpp_weight(q, st, 1, 2).detect_reward == doctest::Approx(12.0));

  // On a two-target toy, the weight decomposition reproduces the full
  // per-mini-slot objective for every detection pattern.
  const double v = 0.7, ee_term = 123.456;
  ivec amax(2);
  amax << 1, 2;
  q.backlog << 2.0, 5.0;
  for (int r0 = 0; r0 <= 1; ++r0) {
    for (int r1 = 0; r1 <= 1; ++r1) {
      double direct = v * ee_term;
      direct -= q.backlog[0] * (1.0 + st.age[0] - r0 * st.age[0] - amax[0]);
      direct -= q.backlog[1] * (1.0 + st.age[1] - r1 * st.age[1] - amax[1]);
      DppWeight a = dpp_weight(q, st, 0, amax[0]);
      DppWeight b = dpp_weight(q, st, 1, amax[1]);
      const double decomposed =
          v * ee_term - a.constant - b.constant + r0 * a.detect_reward + r1 * b.detect_reward;
      CHECK(direct == doctest::Approx(decomposed).epsilon(1e-14));
    }
  }
}

TEST_CASE("finite-horizon average age") {
  std::vector<ivec> hist;
  SUBCASE("constant ones") {
    for (int k = 0; k < 7; ++k) hist.push_back(ivec::Ones(1));
    CHECK(average_aoi(hist, 0) == doctest::Approx(1.0));
  }
  SUBCASE("never detected over n steps") {
    const int n = 9;
    AoiState st = AoiState::initial(1);
    for (int k = 0; k < n; ++k) {
      st = step_aoi(st, ivec::Zero(1));
      hist.push_back(st.age);
    }
    CHECK(average_aoi(hist, 0) == doctest::Approx((n + 1) / 2.0));
  }
  SUBCASE("mixed equals the direct mean") {
    Rng rng(3);
    AoiState st = AoiState::initial(1);
    double sum = 0.0;
    for (int k = 0; k < 50; ++k) {
      ivec det = ivec::Constant(1, rng.uniform() < 0.3 ? 1 : 0);
      st = step_aoi(st, det);
      hist.push_back(st.age);
      sum += st.age[0];
    }
    CHECK(average_aoi(hist, 0) == doctest::Approx(sum / 50.0));
  }
  std::vector<ivec> empty;
  CHECK_THROWS_AS(average_aoi(empty, 0), std::invalid_argument);
}

TEST_CASE("meeting the detection cadence keeps the queue bounded") {
  // Detecting a target at least every aoi_max mini-slots caps the age at the
  // budget, so the backlog never exceeds its largest single-step increment.
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const int amax = 1 + static_cast<int>(rng.uniform(0, 5));
    AoiState st = AoiState::initial(1);
    VirtualQueues q = VirtualQueues::initial(1);
    int since = 0;
    double max_backlog = 0.0;
    for (int k = 0; k < 300; ++k) {
      ++since;
      const bool must = since >= amax;
      const int det = (must || rng.uniform() < 0.4) ? 1 : 0;
      if (det) since = 0;
      st = step_aoi(st, ivec::Constant(1, det));
      q = update_virtual_queue(q, st.age, ivec::Constant(1, amax));
      max_backlog = std::max(max_backlog, q.backlog[0]);
    }
    CHECK(max_backlog <= std::max(0, 1 - amax) + 1e-12);
  }
}

TEST_CASE("per-step drift bound holds on random trajectories") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int targets = 1 + static_cast<int>(rng.uniform(0, 3));
    ivec amax(targets);
    for (int i = 0; i < targets; ++i) amax[i] = 1 + static_cast<int>(rng.uniform(0, 4));
    AoiState st = AoiState::initial(targets);
    VirtualQueues q = VirtualQueues::initial(targets);
    for (int k = 0; k < 100; ++k) {
      ivec det(targets);
      for (int i = 0; i < targets; ++i) det[i] = rng.uniform() < 0.3 ? 1 : 0;
      AoiState next = step_aoi(st, det);
      VirtualQueues nq = update_virtual_queue(q, next.age, amax);
      for (int i = 0; i < targets; ++i) {
        const double u = q.backlog[i], u2 = nq.backlog[i];
        const double gap = next.age[i] - amax[i];
        CHECK(0.5 * (u2 * u2 - u * u) <= u * gap + 0.5 * gap * gap + 1e-12);
      }
      st = next;
      q = nq;
    }
  }
}
