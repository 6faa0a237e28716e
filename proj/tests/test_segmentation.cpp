#include <cmath>
#include <set>

#include "doctest.h"
#include "heartid/errors.hpp"
#include "heartid/segmentation.hpp"
#include "heartid/synth_ecg.hpp"
#include "test_util.hpp"

using namespace heartid;
using testutil::TempDir;

namespace {

EcgRecord flat_record(std::size_t n, double fs) {
  EcgRecord rec;
  rec.subject_id = "s01";
  rec.session_id = "a";
  rec.sampling_rate_hz = fs;
  rec.samples_mv.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    rec.samples_mv[i] = std::sin(static_cast<double>(i) * 0.01);
  return rec;
}

FiducialMarks beat_at(std::size_t r, bool valid = true) {
  FiducialMarks m;
  m.r = r;
  m.q = r > 20 ? r - 20 : 0;
  m.s = r + 20;
  m.p_onset = r > 80 ? r - 80 : 0;
  m.p_peak = r > 60 ? r - 60 : 0;
  m.p_offset = r > 45 ? r - 45 : 0;
  m.t_onset = r + 60;
  m.t_peak = r + 90;
  m.t_offset = r + 120;
  m.valid = valid;
  return m;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("qrs windows are 108 samples at 360 Hz") {
  EcgRecord rec = flat_record(3600, 360.0);
  std::vector<FiducialMarks> marks = {beat_at(400), beat_at(800), beat_at(1200)};
  std::vector<Segment> segs =
      extract_segments(rec, marks, SegmentStrategy::QrsCentric, 64, 1);
  REQUIRE(segs.size() == 3);
  for (const auto& s : segs) {
    CHECK(s.end - s.start == 108);  // 0.3 * 360
    CHECK(s.values.size() == 64);
  }
}

TEST_CASE("pt segments use the exact fiducial bounds") {
  EcgRecord rec = flat_record(2000, 250.0);
  FiducialMarks m = beat_at(1080);
  m.p_onset = 1000;
  m.t_offset = 1210;
  std::vector<Segment> segs =
      extract_segments(rec, {m}, SegmentStrategy::PT, 64, 1);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start == 1000);
  CHECK(segs[0].end == 1210);
}

TEST_CASE("pt skips invalid beats and errors out when none are valid") {
  EcgRecord rec = flat_record(2000, 250.0);
  std::vector<FiducialMarks> marks = {beat_at(500, false), beat_at(900, true),
                                      beat_at(1300, false)};
  std::vector<Segment> segs = extract_segments(rec, marks, SegmentStrategy::PT, 32, 1);
  CHECK(segs.size() == 1);
  std::vector<FiducialMarks> none = {beat_at(500, false)};
  CHECK_THROWS_AS(extract_segments(rec, none, SegmentStrategy::PT, 32, 1), DataError);
}

TEST_CASE("rr spans two consecutive cycles") {
  EcgRecord rec = flat_record(3000, 250.0);
  std::vector<FiducialMarks> marks = {beat_at(400), beat_at(650), beat_at(905),
                                      beat_at(1150)};
  std::vector<Segment> segs = extract_segments(rec, marks, SegmentStrategy::RR, 64, 1);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].start == 400);
  CHECK(segs[0].end == 905);
  CHECK(segs[1].start == 650);
  CHECK(segs[1].end == 1150);
}

TEST_CASE("random windows are deterministic per seed and never overlap") {
  EcgRecord rec = flat_record(5000, 250.0);
  std::vector<FiducialMarks> marks;
  for (std::size_t r = 400; r < 4500; r += 300) marks.push_back(beat_at(r));

  std::vector<Segment> a = extract_segments(rec, marks, SegmentStrategy::Random, 32, 42);
  std::vector<Segment> b = extract_segments(rec, marks, SegmentStrategy::Random, 32, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].start == b[i].start);

  // windows are 1 s = 250 samples and sorted by start
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].end - a[i].start == 250);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].start >= a[i - 1].end);

  // different seeds place windows differently nearly always
  std::size_t differing = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::vector<Segment> s1 = extract_segments(rec, marks, SegmentStrategy::Random, 32, seed);
    std::vector<Segment> s2 =
        extract_segments(rec, marks, SegmentStrategy::Random, 32, seed + 1000);
    bool same = s1.size() == s2.size();
    if (same)
      for (std::size_t i = 0; i < s1.size(); ++i)
        if (s1[i].start != s2[i].start) {
          same = false;
          break;
        }
    if (!same) ++differing;
  }
  CHECK(differing >= 95);
}

TEST_CASE("random window count equals valid beats, capped by record length") {
  EcgRecord rec = flat_record(1000, 250.0);  // room for 4 windows of 250
  std::vector<FiducialMarks> marks;
  for (std::size_t r = 100; r < 900; r += 80) marks.push_back(beat_at(r));  // 10 beats
  std::vector<Segment> segs =
      extract_segments(rec, marks, SegmentStrategy::Random, 32, 3);
  CHECK(segs.size() == 4);
}

TEST_CASE("resampling preserves endpoints exactly and interpolates monotonically") {
  std::vector<double> raw = {1.0, 3.0, 2.0, 5.0, 4.0};
  std::vector<double> up = resample_linear(raw, 17);
  CHECK(up.front() == 1.0);
  CHECK(up.back() == 4.0);
  std::vector<double> down = resample_linear(up, 5);
  CHECK(down.front() == 1.0);
  CHECK(down.back() == 4.0);
  // linear ramp stays a ramp under resampling
  std::vector<double> ramp(11);
  for (std::size_t i = 0; i < 11; ++i) ramp[i] = static_cast<double>(i);
  std::vector<double> r2 = resample_linear(ramp, 21);
  for (std::size_t i = 0; i < 21; ++i)
    CHECK(r2[i] == doctest::Approx(static_cast<double>(i) * 0.5).epsilon(1e-12));
}

TEST_CASE("target_len below 8 is rejected") {
  EcgRecord rec = flat_record(2000, 250.0);
  std::vector<FiducialMarks> marks = {beat_at(500)};
  CHECK_THROWS_AS(extract_segments(rec, marks, SegmentStrategy::PT, 7, 1),
                  std::invalid_argument);
}

TEST_CASE("per-subject budget keeps the first N segments") {
  std::vector<Segment> segs;
  for (int i = 0; i < 30; ++i) {
    Segment s;
    s.subject_id = i % 2 ? "s02" : "s01";
    s.start = static_cast<std::size_t>(i);
    segs.push_back(s);
  }
  std::vector<Segment> capped = cap_per_subject(segs, 5);
  CHECK(capped.size() == 10);
  std::size_t s01 = 0, s02 = 0;
  for (const auto& s : capped) {
    if (s.subject_id == "s01") {
      ++s01;
      CHECK(s.start <= 8);  // first five even indices
    } else {
      ++s02;
      CHECK(s.start <= 9);
    }
  }
  CHECK(s01 == 5);
  CHECK(s02 == 5);
}

TEST_CASE("segment store round-trips") {
  TempDir dir("store");
  SyntheticEcgSpec spec;
  SynthResult res = synth_ecg(spec, 10.0, 250.0);
  RPeakList peaks{res.r_peaks, 250.0};
  std::vector<FiducialMarks> marks = delineate(res.record, peaks);
  std::vector<Segment> segs =
      extract_segments(res.record, marks, SegmentStrategy::PT, 64, 1);
  write_segment_store(dir.file("segs.csv"), segs, ArtifactStamp{7, 0x1234});
  std::vector<Segment> back = read_segment_store(dir.file("segs.csv"));
  REQUIRE(back.size() == segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(back[i].subject_id == segs[i].subject_id);
    CHECK(back[i].start == segs[i].start);
    CHECK(back[i].end == segs[i].end);
    CHECK(back[i].values == segs[i].values);  // exact round-trip
  }
  std::string text = read_text_file(dir.file("segs.csv"));
  CHECK(text.find("# tool=heartid") == 0);
  CHECK(text.find("seed=7") != std::string::npos);
}

TEST_CASE("strategy names parse and reject unknowns") {
  CHECK(parse_strategy("pt") == SegmentStrategy::PT);
  CHECK(parse_strategy("qrs") == SegmentStrategy::QrsCentric);
  CHECK(parse_strategy("rr") == SegmentStrategy::RR);
  CHECK(parse_strategy("random") == SegmentStrategy::Random);
  CHECK_THROWS_AS(parse_strategy("bogus"), std::invalid_argument);
}

}  // TEST_SUITE
