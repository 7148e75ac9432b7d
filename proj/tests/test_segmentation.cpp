#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "gaitkit/segmentation.hpp"
#include "gaitkit/synth.hpp"
#include "test_helpers.hpp"

using namespace gaitkit;
using Catch::Approx;
using testutil::make_series;

namespace {

/// One synthetic interval covering the whole series.
std::vector<WalkInterval> whole_series_interval(const SampleSeries& s) {
  return {{0, s.size() - 1, 1.0}};
}

}  // namespace

TEST_CASE("detect_walking") {
  SECTION("constant motion above threshold: one interval covering everything") {
    const auto s = make_series(30.0, 1801, [](double t) { return 1.0 * t; },
                               [](double) { return 0.0; }, [](double) { return 0.0; });
    const auto intervals = detect_walking(s, 0.0, 0.0);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0].start_index == 0);
    CHECK(intervals[0].end_index == s.size() - 1);
    CHECK(intervals[0].mean_speed_mps == Approx(1.0).margin(1e-9));
  }

  SECTION("stationary series: empty result") {
    const auto s = make_series(30.0, 600, [](double) { return 1.0; }, [](double) { return 2.0; },
                               [](double) { return 3.0; });
    CHECK(detect_walking(s, 0.1, 1.0).empty());
  }

  SECTION("walk / stand / walk boundaries within 0.5 s") {
    // 20 s at 1 m/s, 10 s standstill, 20 s at 1 m/s again
    auto ap = [](double t) {
      if (t < 20.0) return t;
      if (t < 30.0) return 20.0;
      return 20.0 + (t - 30.0);
    };
    const auto s = make_series(30.0, 1501, ap, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    const auto intervals = detect_walking(s, 0.1, 5.0);
    REQUIRE(intervals.size() == 2);
    CHECK(std::abs(s.t[intervals[0].start_index] - 0.0) <= 0.5);
    CHECK(std::abs(s.t[intervals[0].end_index] - 20.0) <= 0.5);
    CHECK(std::abs(s.t[intervals[1].start_index] - 30.0) <= 0.5);
    CHECK(std::abs(s.t[intervals[1].end_index] - 50.0) <= 0.5);
  }

  SECTION("runs shorter than min_duration are dropped") {
    auto ap = [](double t) { return (t >= 5.0 && t < 10.0) ? t - 5.0 : (t < 5.0 ? 0.0 : 5.0); };
    const auto s = make_series(30.0, 601, ap, [](double) { return 0.0; }, [](double) { return 0.0; });
    CHECK(detect_walking(s, 0.1, 8.0).empty());
    CHECK(detect_walking(s, 0.1, 3.0).size() == 1);
  }

  SECTION("threshold 0 on a strictly moving series spans all samples") {
    const auto [s, truth] = gen_walk(make_walk_params(0.9, 0.5));
    const auto intervals = detect_walking(s, 0.0, 0.0);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0].start_index == 0);
    CHECK(intervals[0].end_index == s.size() - 1);
  }
}

TEST_CASE("generate_bouts counting") {
  SECTION("60 s interval, 15 s / 3 s: 16 bouts starting at 0,3,...,45") {
    const auto s = make_series(30.0, 1801, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    const auto bouts = generate_bouts(s, whole_series_interval(s), 15.0, 3.0);
    REQUIRE(bouts.size() == 16);
    for (std::size_t k = 0; k < bouts.size(); ++k) {
      CHECK(bouts[k].start_time_s == Approx(3.0 * static_cast<double>(k)).margin(1e-9));
      CHECK(bouts[k].length_s == Approx(15.0).margin(1.0 / 30.0));
      CHECK(bouts[k].subject_id == s.subject_id);
      CHECK(bouts[k].tug_score_s == s.tug_score_s);
    }
  }

  SECTION("14 s interval yields no bouts") {
    const auto s = make_series(30.0, 421, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    CHECK(generate_bouts(s, whole_series_interval(s), 15.0, 3.0).empty());
  }

  SECTION("intervals of 20 s and 33 s yield 2 + 7 bouts") {
    const auto s = make_series(30.0, 1801, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    // 20 s: samples [0, 600]; 33 s: samples [660, 1650]
    const std::vector<WalkInterval> intervals = {{0, 600, 1.0}, {660, 1650, 1.0}};
    const auto bouts = generate_bouts(s, intervals, 15.0, 3.0);
    CHECK(bouts.size() == 2 + 7);
  }

  SECTION("count formula floor((D-L)/S)+1 holds over a parameter grid") {
    const auto s = make_series(30.0, 4001, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    for (std::size_t end : {450u, 451u, 900u, 1399u, 2000u, 3600u}) {
      for (double L : {5.0, 10.0, 15.0}) {
        for (double S : {1.0, 3.0, 5.0, 15.0}) {
          const std::vector<WalkInterval> iv = {{0, end, 1.0}};
          const auto bouts = generate_bouts(s, iv, L, S);
          const long long len = std::llround(L * 30.0);
          const long long step = std::llround(S * 30.0);
          const long long expected =
              static_cast<long long>(end) >= len
                  ? (static_cast<long long>(end) - len) / step + 1
                  : 0;
          REQUIRE(static_cast<long long>(bouts.size()) == expected);
        }
      }
    }
  }
}

TEST_CASE("bout properties") {
  const auto s = make_series(30.0, 2701, [](double t) { return 0.8 * t; },
                             [](double) { return 0.0; }, [](double) { return 0.0; });

  SECTION("every bout lies inside its interval") {
    const std::vector<WalkInterval> intervals = {{30, 1000, 1.0}, {1200, 2700, 1.0}};
    for (const auto& b : generate_bouts(s, intervals, 15.0, 3.0)) {
      const bool in_first = b.start_index >= 30 && b.start_index + b.n_samples - 1 <= 1000;
      const bool in_second = b.start_index >= 1200 && b.start_index + b.n_samples - 1 <= 2700;
      CHECK((in_first || in_second));
      CHECK_FALSE((in_first && in_second));
    }
  }

  SECTION("bout count is monotone in duration and antitone in step") {
    std::size_t prev = 0;
    for (std::size_t end = 450; end <= 2700; end += 450) {
      const auto n = generate_bouts(s, {{0, end, 1.0}}, 15.0, 3.0).size();
      CHECK(n >= prev);
      prev = n;
    }
    std::size_t prev_steps = std::numeric_limits<std::size_t>::max();
    for (double step : {1.0, 2.0, 3.0, 6.0, 15.0}) {
      const auto n = generate_bouts(s, {{0, 2700, 1.0}}, 15.0, step).size();
      CHECK(n <= prev_steps);
      prev_steps = n;
    }
  }

  SECTION("bout_step == bout_length gives non-overlapping bouts") {
    const auto bouts = generate_bouts(s, {{0, 2700, 1.0}}, 15.0, 15.0);
    for (std::size_t i = 1; i < bouts.size(); ++i)
      CHECK(bouts[i].start_index >= bouts[i - 1].start_index + bouts[i - 1].n_samples - 1);
  }

  SECTION("bout_slice re-bases time and copies the window") {
    const auto bouts = generate_bouts(s, {{60, 600, 1.0}}, 10.0, 5.0);
    REQUIRE_FALSE(bouts.empty());
    const auto slice = bout_slice(bouts[1]);
    slice.validate();
    CHECK(slice.t.front() == 0.0);
    CHECK(slice.size() == bouts[1].n_samples);
    CHECK(slice.pos_ap.front() == s.pos_ap[bouts[1].start_index]);
  }
}
