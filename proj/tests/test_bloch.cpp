#include <gtest/gtest.h>

#include "aperiodix/bloch.hpp"

using namespace aperiodix;

TEST(Bloch, Fibonacci) {
  auto r = bloch_report("fibonacci");
  EXPECT_TRUE(r.verdicts.gaps_in_trace_group);
  EXPECT_TRUE(r.verdicts.bragg_in_module);
  EXPECT_TRUE(r.verdicts.diffraction_matches_trace);
  EXPECT_EQ(r.tags, std::set<SpectrumTag>{SpectrumTag::PP});
  EXPECT_EQ(r.trace_group, group_for_family("fibonacci"));
  EXPECT_EQ(r.h1.name(), "Z^2");
  EXPECT_FALSE(r.gaps.empty());
  for (const auto& g : r.gaps) EXPECT_TRUE(g.in_group);
}

TEST(Bloch, Periodic) {
  auto r = bloch_report("periodic");
  EXPECT_TRUE(r.verdicts.gaps_in_trace_group);
  EXPECT_TRUE(r.verdicts.diffraction_matches_trace);
  ASSERT_EQ(r.gaps.size(), 1u);
  EXPECT_DOUBLE_EQ(r.gaps[0].label_target, 0.5);
}

TEST(Bloch, RudinShapiroIsAbsolutelyContinuous) {
  auto r = bloch_report("rudin-shapiro");
  EXPECT_TRUE(r.verdicts.gaps_in_trace_group);
  EXPECT_FALSE(r.verdicts.diffraction_matches_trace);
  EXPECT_EQ(r.tags, std::set<SpectrumTag>{SpectrumTag::AC});
}

TEST(Bloch, PrecomputedGapsAreUsed) {
  BlochOptions opt;
  Gap g;
  g.lower = 0;
  g.upper = 0.1;
  g.width = 0.1;
  g.ids_value = 0.3;
  opt.gaps = std::vector<Gap>{g};
  auto r = bloch_report("fibonacci", opt);
  ASSERT_EQ(r.gaps.size(), 1u);
  EXPECT_DOUBLE_EQ(r.gaps[0].label_target, 0.3);
  EXPECT_EQ(r.gaps[0].in_group, r.gaps[0].label.residual <= opt.tol);
  EXPECT_TRUE(r.spectrum.eigenvalues.empty());
}

TEST(Bloch, VerdictMonotoneInTolerance) {
  auto r = bloch_report("fibonacci");
  for (double tol : {1e-9, 1e-6, 1e-4, 1e-3, 1e-2}) {
    CorrespondenceReport tight = r, loose = r;
    tight.tol = tol;
    loose.tol = tol * 10;
    if (derive_verdicts(tight).gaps_in_trace_group) { EXPECT_TRUE(derive_verdicts(loose).gaps_in_trace_group); }
  }
}

TEST(Bloch, UnknownFamily) {
  try {
    bloch_report("penrose");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFamily);
  }
}
