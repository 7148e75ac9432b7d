#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

#include "gaitkit/core.hpp"
#include "gaitkit/io.hpp"
#include "gaitkit/rng.hpp"
#include "gaitkit/signal.hpp"
#include "test_helpers.hpp"

using namespace gaitkit;
using Catch::Approx;
using testutil::make_series;
using testutil::scratch_dir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("manifest round trip and token handling") {
  const auto dir = scratch_dir("manifest");

  SECTION("two rows parse into two descriptors") {
    write_text(dir / "m.csv",
               "subject_id,group,site,condition,tug_score,sample_rate,path\n"
               "S1,patient,lab-a,TUG,12.5,30,s1_tug.csv\n"
               "S2,control,lab-b,Daily,9.75,25,s2_daily.csv\n");
    const auto d = parse_manifest(dir / "m.csv");
    REQUIRE(d.size() == 2);
    CHECK(d[0].meta.subject_id == "S1");
    CHECK(d[0].meta.group == Group::Patient);
    CHECK(d[0].condition == Condition::TUG);
    CHECK(d[0].tug_score_s == 12.5);
    CHECK(d[0].sample_rate_hz == 30.0);
    CHECK(d[0].path == dir / "s1_tug.csv");
    CHECK(d[1].condition == Condition::Daily);
  }

  SECTION("header-only file gives an empty sequence") {
    write_text(dir / "empty.csv", "subject_id,group,site,condition,tug_score,sample_rate,path\n");
    CHECK(parse_manifest(dir / "empty.csv").empty());
  }

  SECTION("condition and group tokens are trimmed and case-folded") {
    write_text(dir / "trim.csv",
               "subject_id,group,site,condition,tug_score,sample_rate,path\n"
               "S1, PATIENT ,lab,tug ,12.5,30,r.csv\n");
    const auto d = parse_manifest(dir / "trim.csv");
    REQUIRE(d.size() == 1);
    CHECK(d[0].condition == Condition::TUG);
    CHECK(d[0].meta.group == Group::Patient);
  }

  SECTION("malformed rows name the row") {
    write_text(dir / "bad.csv",
               "subject_id,group,site,condition,tug_score,sample_rate,path\n"
               "S1,patient,lab,TUG,12.5,30,r.csv\n"
               "S2,control,lab,TUG,12.5,30\n");
    CHECK_THROWS_WITH(parse_manifest(dir / "bad.csv"),
                      Catch::Matchers::ContainsSubstring("row 3"));
  }

  SECTION("unknown condition token is rejected") {
    write_text(dir / "cond.csv",
               "subject_id,group,site,condition,tug_score,sample_rate,path\n"
               "S1,patient,lab,walking,12.5,30,r.csv\n");
    CHECK_THROWS_WITH(parse_manifest(dir / "cond.csv"),
                      Catch::Matchers::ContainsSubstring("condition"));
  }

  SECTION("duplicate (subject, path) pairs are rejected") {
    write_text(dir / "dup.csv",
               "subject_id,group,site,condition,tug_score,sample_rate,path\n"
               "S1,patient,lab,TUG,12.5,30,r.csv\n"
               "S1,patient,lab,Daily,12.5,30,r.csv\n");
    CHECK_THROWS_WITH(parse_manifest(dir / "dup.csv"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
  }
}

TEST_CASE("recording parsing") {
  const auto dir = scratch_dir("recording");
  const SubjectMeta meta{"S1", Group::Control, "lab"};

  SECTION("three rows at 30 Hz parse and re-base") {
    write_text(dir / "r.csv",
               "t,pos_ap,pos_ml,pos_v\n"
               "5.0,0.0,0.0,1.0\n"
               "5.0333333333333333,0.1,0.0,1.0\n"
               "5.0666666666666666,0.2,0.0,1.0\n");
    const auto s = parse_recording(dir / "r.csv", meta, 30.0, Condition::TUG, 12.0);
    REQUIRE(s.size() == 3);
    CHECK(s.t[0] == 0.0);
    CHECK(s.t[2] == Approx(2.0 / 30.0).margin(1e-12));
    CHECK(s.pos_ap[2] == 0.2);
  }

  SECTION("out-of-order timestamps report the row") {
    write_text(dir / "mono.csv",
               "t,pos_ap,pos_ml,pos_v\n"
               "0.0,0,0,0\n"
               "0.0333,0,0,0\n"
               "0.0222,0,0,0\n");
    CHECK_THROWS_WITH(parse_recording(dir / "mono.csv", meta, 30.0, Condition::TUG, 12.0),
                      Catch::Matchers::ContainsSubstring("non-monotone timestamp at row 4"));
  }

  SECTION("missing column is rejected") {
    write_text(dir / "cols.csv", "t,pos_ap,pos_ml\n0,0,0\n");
    CHECK_THROWS_WITH(parse_recording(dir / "cols.csv", meta, 30.0, Condition::TUG, 12.0),
                      Catch::Matchers::ContainsSubstring("pos_v"));
  }

  SECTION("NaN cell reports the row") {
    write_text(dir / "nan.csv",
               "t,pos_ap,pos_ml,pos_v\n"
               "0.0,0,0,0\n"
               "0.03333333,nan,0,0\n"
               "0.06666667,0,0,0\n");
    CHECK_THROWS_WITH(parse_recording(dir / "nan.csv", meta, 30.0, Condition::TUG, 12.0),
                      Catch::Matchers::ContainsSubstring("row 3"));
  }

  SECTION("write then parse reproduces the payload bit for bit") {
    Rng rng(7);
    auto s = make_series(30.0, 200, [](double) { return 0.0; }, [](double) { return 0.0; },
                         [](double) { return 0.0; });
    for (std::size_t i = 0; i < s.size(); ++i) {
      s.pos_ap[i] = rng.normal(0.0, 1.2345);
      s.pos_ml[i] = rng.normal(0.0, 0.3);
      s.pos_v[i] = rng.normal(1.0, 0.01);
    }
    write_recording(s, dir / "rt.csv");
    const auto back = parse_recording(dir / "rt.csv", meta, 30.0, Condition::Daily, 8.0);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      REQUIRE(back.t[i] == s.t[i]);
      REQUIRE(back.pos_ap[i] == s.pos_ap[i]);
      REQUIRE(back.pos_ml[i] == s.pos_ml[i]);
      REQUIRE(back.pos_v[i] == s.pos_v[i]);
    }
  }

  SECTION("non-uniform input is resampled onto the declared rate") {
    std::string body = "t,pos_ap,pos_ml,pos_v\n";
    Rng rng(11);
    double t = 0.0;
    for (int i = 0; i < 120; ++i) {
      body += csv::format_double(t) + "," + csv::format_double(0.5 * t) + ",0,0\n";
      t += (1.0 + 0.4 * (rng.uniform() - 0.5)) / 30.0;  // up to 20% gap jitter
    }
    write_text(dir / "jitter.csv", body);
    const auto s = parse_recording(dir / "jitter.csv", meta, 30.0, Condition::TUG, 12.0);
    s.validate();
    CHECK(s.sample_rate_hz == 30.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(s.pos_ap[i] == Approx(0.5 * s.t[i]).margin(1e-9));
  }
}

TEST_CASE("series invariants are enforced") {
  auto s = make_series(30.0, 10, [](double t) { return t; }, [](double) { return 0.0; },
                       [](double) { return 0.0; });
  CHECK_NOTHROW(s.validate());

  SECTION("tug score must be positive") {
    s.tug_score_s = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("channel lengths must match") {
    s.pos_v.pop_back();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("gap deviation above 10% is rejected") {
    s.t[5] += 0.3 / 30.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
}

TEST_CASE("derive_speed") {
  SECTION("linear motion at 0.5 m/s") {
    const auto s = make_series(30.0, 100, [](double t) { return 0.5 * t; },
                               [](double) { return 2.0; }, [](double) { return 1.0; });
    for (double v : derive_speed(s)) CHECK(v == Approx(0.5).margin(1e-9));
  }

  SECTION("constant channels give zero speed") {
    const auto s = make_series(30.0, 50, [](double) { return 1.0; }, [](double) { return 2.0; },
                               [](double) { return 3.0; });
    for (double v : derive_speed(s)) CHECK(v == 0.0);
  }

  SECTION("circular trajectory matches r*omega within 1% at 100 Hz") {
    const double r = 0.8;
    const double omega = 2.0 * std::numbers::pi * 0.5;
    const auto s = make_series(100.0, 400, [&](double t) { return r * std::cos(omega * t); },
                               [&](double t) { return r * std::sin(omega * t); },
                               [](double) { return 1.0; });
    const auto speed = derive_speed(s);
    for (std::size_t i = 1; i + 1 < speed.size(); ++i)
      CHECK(speed[i] == Approx(r * omega).epsilon(0.01));
  }

  SECTION("invariant under constant position offsets") {
    const auto base = make_series(30.0, 200, [](double t) { return 0.3 * t + 0.01 * std::sin(9.0 * t); },
                                  [](double t) { return 0.02 * std::sin(4.0 * t); },
                                  [](double t) { return 0.01 * std::cos(11.0 * t); });
    auto shifted = base;
    for (auto& v : shifted.pos_ap) v += 17.5;
    for (auto& v : shifted.pos_ml) v -= 3.25;
    for (auto& v : shifted.pos_v) v += 0.125;
    const auto a = derive_speed(base);
    const auto b = derive_speed(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == Approx(a[i]).margin(1e-12));
  }

  SECTION("needs two samples") {
    auto s = make_series(30.0, 2, [](double t) { return t; }, [](double) { return 0.0; },
                         [](double) { return 0.0; });
    s.t.resize(1);
    s.pos_ap.resize(1);
    s.pos_ml.resize(1);
    s.pos_v.resize(1);
    CHECK_THROWS_AS(derive_speed(s), std::invalid_argument);
  }
}

TEST_CASE("derive_acceleration") {
  SECTION("quadratic vertical position recovers the acceleration") {
    const double a = 0.4;
    const auto s = make_series(30.0, 150, [](double) { return 0.0; }, [](double) { return 0.0; },
                               [&](double t) { return 0.5 * a * t * t; });
    const auto acc = derive_acceleration(s);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) CHECK(acc[2][i] == Approx(a).margin(1e-6));
  }

  SECTION("linear position gives zero acceleration") {
    const auto s = make_series(30.0, 100, [](double t) { return 0.7 * t; },
                               [](double t) { return -0.2 * t; }, [](double) { return 1.0; });
    const auto acc = derive_acceleration(s);
    for (int axis = 0; axis < 3; ++axis)
      for (double v : acc[axis]) CHECK(std::abs(v) < 1e-9);
  }

  SECTION("sinusoid amplitude within 2% at 20 samples per cycle") {
    const double amp = 0.05;
    const double f = 1.5;
    const double rate = 30.0;  // 20 samples per cycle
    const double omega = 2.0 * std::numbers::pi * f;
    const auto s = make_series(rate, 400, [](double) { return 0.0; }, [](double) { return 0.0; },
                               [&](double t) { return amp * std::sin(omega * t); });
    const auto acc = derive_acceleration(s);
    double peak = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) peak = std::max(peak, std::abs(acc[2][i]));
    CHECK(peak == Approx(amp * omega * omega).epsilon(0.02));
  }

  SECTION("invariant under adding an affine function of t") {
    const auto base = make_series(30.0, 120, [](double t) { return 0.01 * std::sin(7.0 * t); },
                                  [](double t) { return 0.02 * std::cos(5.0 * t); },
                                  [](double t) { return 0.03 * std::sin(3.0 * t); });
    auto affine = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
      affine.pos_ap[i] += 2.0 + 0.5 * base.t[i];
      affine.pos_ml[i] += -1.0 + 1.5 * base.t[i];
      affine.pos_v[i] += 0.25 - 0.75 * base.t[i];
    }
    const auto a = derive_acceleration(base);
    const auto b = derive_acceleration(affine);
    for (int axis = 0; axis < 3; ++axis)
      for (std::size_t i = 1; i + 1 < base.size(); ++i) {
        const double scale = std::max(1.0, std::abs(a[axis][i]));
        CHECK(std::abs(b[axis][i] - a[axis][i]) / scale < 1e-9);
      }
  }

  SECTION("needs three samples") {
    const auto s = make_series(30.0, 2, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    CHECK_THROWS_AS(derive_acceleration(s), std::invalid_argument);
  }
}

TEST_CASE("resample") {
  SECTION("identity at the same rate") {
    const auto s = make_series(30.0, 90, [](double t) { return std::sin(3.0 * t); },
                               [](double t) { return t; }, [](double) { return 0.0; });
    const auto r = resample(s, 30.0);
    REQUIRE(r.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(r.pos_ap[i] - s.pos_ap[i]) < 1e-12);
      CHECK(std::abs(r.pos_ml[i] - s.pos_ml[i]) < 1e-12);
    }
  }

  SECTION("affine signals stay exactly affine at any rate") {
    const auto s = make_series(30.0, 61, [](double t) { return 1.0 + 2.0 * t; },
                               [](double t) { return -0.5 * t; }, [](double) { return 0.0; });
    const auto r = resample(s, 47.0);
    r.validate();
    for (std::size_t i = 0; i < r.size(); ++i)
      CHECK(r.pos_ap[i] == Approx(1.0 + 2.0 * r.t[i]).margin(1e-12));
  }

  SECTION("duration preserved within one sample period") {
    const auto s = make_series(30.0, 301, [](double t) { return t; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
    const auto r = resample(s, 60.0);
    CHECK(std::abs(r.duration_s() - s.duration_s()) <= 1.0 / 60.0);
  }

  SECTION("jittered sinusoid onto 60 Hz within 1% amplitude") {
    SampleSeries s;
    s.subject_id = "J";
    s.sample_rate_hz = 50.0;
    s.tug_score_s = 10.0;
    Rng rng(3);
    double t = 0.0;
    const double omega = 2.0 * std::numbers::pi;
    for (int i = 0; i < 400; ++i) {
      s.t.push_back(t);
      s.pos_ap.push_back(std::sin(omega * t));
      s.pos_ml.push_back(0.0);
      s.pos_v.push_back(0.0);
      t += (1.0 + 0.4 * (rng.uniform() - 0.5)) / 50.0;
    }
    const auto r = resample(s, 60.0);
    r.validate();
    for (std::size_t i = 0; i < r.size(); ++i)
      CHECK(std::abs(r.pos_ap[i] - std::sin(omega * r.t[i])) < 0.01);
  }

  SECTION("idempotent on already-uniform series") {
    const auto s = make_series(25.0, 100, [](double t) { return std::cos(2.0 * t); },
                               [](double) { return 0.0; }, [](double) { return 0.0; });
    const auto once = resample(s, 25.0);
    const auto twice = resample(once, 25.0);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(std::abs(once.pos_ap[i] - twice.pos_ap[i]) < 1e-12);
  }
}
