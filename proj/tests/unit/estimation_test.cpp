#include <gtest/gtest.h>

#include "radaccum/error.hpp"
#include "radaccum/estimation.hpp"
#include "radaccum/synth.hpp"
#include "test_support.hpp"

namespace radaccum {
namespace {

using testing_support::max_abs_diff;
using testing_support::to_m4;

std::pair<Sequence, synth::GroundTruth> short_run(std::string_view name, double duration) {
  synth::ScenarioConfig cfg = synth::builtin_scenario(name);
  cfg.duration = duration;
  return synth::simulate(cfg);
}

EstimationOptions with_method(EstimatorKind kind) {
  EstimationOptions o;
  o.method = kind;
  return o;
}

TEST(Estimators, NamesRoundTrip) {
  const auto names = estimator_names();
  EXPECT_EQ(names.size(), 8u);
  for (const auto& n : names) EXPECT_EQ(to_string(parse_estimator(n)), n);
  try {
    parse_estimator("icp");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gicp-lidar"), std::string::npos);
  }
}

TEST(Estimators, PoseMatchesGroundTruth) {
  const auto [seq, truth] = short_run("turn", 2.0);
  const auto pairs = estimate_sequence(seq, with_method(EstimatorKind::Pose));
  ASSERT_EQ(pairs.size(), seq.frames.size() - 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ASSERT_TRUE(pairs[i].ok()) << pairs[i].error;
    EXPECT_EQ(pairs[i].estimate.method, EgoMethod::Pose);
    EXPECT_LT(max_abs_diff(to_m4(pairs[i].estimate.transform), to_m4(truth.ego_motion[i].transform)),
              1e-9);
  }
  const auto gt = estimate_sequence(seq, with_method(EstimatorKind::GroundTruth));
  for (std::size_t i = 0; i < gt.size(); ++i) {
    EXPECT_LT(max_abs_diff(to_m4(gt[i].estimate.transform), to_m4(truth.ego_motion[i].transform)),
              1e-12);
  }
  for (const auto& p : estimate_sequence(seq, with_method(EstimatorKind::None))) {
    EXPECT_TRUE(p.ok());
    EXPECT_EQ(p.estimate.transform.translation(), Vec3::Zero());
  }
}

TEST(Estimators, MissingPoseIsRecordedPerPair) {
  auto [seq, truth] = short_run("straight-15kmh", 1.0);
  seq.frames[3].ego_to_world.reset();
  const auto pairs = estimate_sequence(seq, with_method(EstimatorKind::Pose));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 2 || i == 3) {
      EXPECT_NE(pairs[i].error.find("missing pose for frame 3"), std::string::npos);
    } else {
      EXPECT_TRUE(pairs[i].ok());
    }
  }
  EXPECT_EQ(successful_estimates(pairs).size(), pairs.size() - 2);
}

TEST(Estimators, DopplerExactWithoutNoise) {
  synth::ScenarioConfig cfg = synth::builtin_scenario("straight-15kmh");
  cfg.duration = 3.0;
  cfg.noise = {};
  const auto [seq, truth] = synth::simulate(cfg);
  const auto pairs = estimate_sequence(seq, with_method(EstimatorKind::Doppler));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ASSERT_TRUE(pairs[i].ok()) << pairs[i].error;
    const Vec3 gt = truth.ego_motion[i].transform.translation();
    EXPECT_LT((pairs[i].estimate.transform.translation() - gt).norm(), 1e-9);
  }
}

TEST(Estimators, StaticObjectsNeedsThreeLabels) {
  synth::ScenarioConfig cfg = synth::builtin_scenario("straight-15kmh");
  cfg.duration = 1.0;
  std::vector<synth::SimObject> kept;
  for (const auto& o : cfg.objects) {
    if (o.is_static && kept.size() < 2) kept.push_back(o);
  }
  cfg.objects = kept;
  const auto [seq, truth] = synth::simulate(cfg);
  const auto pairs = estimate_sequence(seq, with_method(EstimatorKind::StaticObjects));
  for (const auto& p : pairs) {
    EXPECT_NE(p.error.find("insufficient static objects"), std::string::npos) << p.error;
  }
  const std::string csv = estimates_to_csv(pairs, "static-objects");
  EXPECT_NE(csv.find(",insufficient static objects"), std::string::npos);
}

TEST(Estimators, SmoothedGicpSmoothsRawGicp) {
  const auto [seq, truth] = short_run("cluttered-urban", 1.2);
  const auto raw = estimate_sequence(seq, with_method(EstimatorKind::GicpLidar));
  const auto smoothed = estimate_sequence(seq, with_method(EstimatorKind::SmoothedGicpLidar));
  ASSERT_EQ(raw.size(), smoothed.size());
  const auto expected = em_smooth(successful_estimates(raw), 6);
  ASSERT_EQ(expected.size(), raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ASSERT_TRUE(smoothed[i].ok()) << smoothed[i].error;
    EXPECT_EQ(smoothed[i].estimate.method, EgoMethod::SmoothedGicp);
    EXPECT_LT(max_abs_diff(to_m4(smoothed[i].estimate.transform), to_m4(expected[i].transform)),
              1e-12);
  }
}

TEST(Estimators, PreviousInitAgreesWithIdentityInit) {
  const auto [seq, truth] = short_run("straight-15kmh", 0.6);
  EstimationOptions a = with_method(EstimatorKind::GicpRadar);
  EstimationOptions b = a;
  b.gicp_init = GicpInit::Previous;
  const auto pa = estimate_sequence(seq, a);
  const auto pb = estimate_sequence(seq, b);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    ASSERT_TRUE(pa[i].ok() && pb[i].ok());
    EXPECT_LT((pa[i].estimate.transform.translation() - pb[i].estimate.transform.translation())
                  .norm(),
              0.05);
  }
}

TEST(EstimateCsv, RoundTrip) {
  const auto [seq, truth] = short_run("oncoming-car", 0.5);
  auto pairs = estimate_sequence(seq, with_method(EstimatorKind::Doppler));
  pairs[1].error = "broken, badly\non two lines";
  pairs[1].estimate.transform = RigidTransform::Identity();
  const std::string csv = estimates_to_csv(pairs, "doppler");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "from_id,to_id,method,tx,ty,tz,qw,qx,qy,qz,inliers,rms,status");
  const auto parsed = estimates_from_csv(csv);
  ASSERT_EQ(parsed.size(), pairs.size());
  EXPECT_EQ(parsed[1].pair.error, "broken; badly;on two lines");
  std::vector<PairEstimate> back;
  for (const auto& c : parsed) {
    EXPECT_EQ(c.method, "doppler");
    back.push_back(c.pair);
  }
  EXPECT_EQ(estimates_to_csv(back, "doppler"), csv);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 1) continue;
    EXPECT_EQ(parsed[i].pair.estimate.transform.translation(),
              pairs[i].estimate.transform.translation());
  }

  // Two methods under one header.
  const std::string pose = estimates_to_csv(estimate_sequence(seq, with_method(EstimatorKind::Pose)),
                                            "pose");
  const std::string both = csv + pose.substr(pose.find('\n') + 1);
  const auto mixed = estimates_from_csv(both);
  EXPECT_EQ(mixed.size(), 2 * pairs.size());
  EXPECT_EQ(mixed.back().method, "pose");
}

TEST(EstimateCsv, Errors) {
  const std::string header = "from_id,to_id,method,tx,ty,tz,qw,qx,qy,qz,inliers,rms,status\n";
  EXPECT_THROW(estimates_from_csv(""), Error);
  EXPECT_THROW(estimates_from_csv("a,b\n"), Error);
  EXPECT_THROW(estimates_from_csv(header + "0,1,pose,0,0,0,1,0,0\n"), Error);
  EXPECT_THROW(estimates_from_csv(header + "0,1,pose,0,0,0,2,0,0,0,1,0,ok\n"), Error);
  EXPECT_THROW(estimates_from_csv(header + "0,1,pose,x,0,0,1,0,0,0,1,0,ok\n"), Error);
  EXPECT_EQ(estimates_from_csv(header + "0,1,pose,0,0,0,1,0,0,0,1,0,ok\n").size(), 1u);
}

}  // namespace
}  // namespace radaccum
