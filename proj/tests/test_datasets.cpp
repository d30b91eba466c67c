#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "landscape/certify.hpp"
#include "landscape/dataset.hpp"
#include "support/generators.hpp"

namespace {

using namespace landscape;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::size_t distinct_rows(const Dataset& data) {
  std::set<std::vector<double>> rows;
  for (std::size_t i = 0; i < data.size(); ++i) rows.insert({data.row(i).begin(), data.row(i).end()});
  return rows.size();
}

TEST(Dataset, ConstructionChecks) {
  EXPECT_THROW(Dataset(0, {}, {1}), std::invalid_argument);
  EXPECT_THROW(Dataset(1, {}, {}), std::invalid_argument);
  EXPECT_THROW(Dataset(2, {1.0}, {1}), std::invalid_argument);
  EXPECT_THROW(Dataset(1, {1.0}, {0}), std::invalid_argument);
}

TEST(Xor, ContractAndNoLinearSeparator) {
  const auto data = gen_xor();
  ASSERT_EQ(data.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(std::abs(data.row(i)[0]), 1.0);
    EXPECT_EQ(data.label(i), data.row(i)[0] * data.row(i)[1] > 0 ? 1 : -1);
  }
  EXPECT_EQ(data.witness_margin(), 1.0);
  // Best affine classifier over a fine grid of normals and offsets.
  int best = 4;
  for (int a = 0; a < 720; ++a) {
    const double th = 2.0 * std::numbers::pi * a / 720.0;
    for (int o = -60; o <= 60; ++o) {
      const double b = o / 20.0;
      int wrong = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        const double s = std::cos(th) * data.row(i)[0] + std::sin(th) * data.row(i)[1] + b;
        wrong += (s >= 0 ? 1 : -1) != data.label(i) ? 1 : 0;
      }
      best = std::min(best, wrong);
    }
  }
  EXPECT_EQ(best, 1);
}

TEST(LinearlySeparable, Contract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = gen_linearly_separable(40, 3, 0.5, seed);
    ASSERT_EQ(data.size(), 40u);
    EXPECT_EQ(data.dim(), 3u);
    EXPECT_EQ(distinct_rows(data), 40u);
    for (std::size_t i = 0; i < data.size(); ++i) EXPECT_LE(norm(data.row(i)), 3.0);
    ASSERT_TRUE(data.witness_margin().has_value());
    EXPECT_GE(*data.witness_margin(), 0.5);
    EXPECT_EQ(data.meta().witness->degree(), 1);
    EXPECT_EQ(gen_linearly_separable(40, 3, 0.5, seed), data);
  }
  EXPECT_NE(gen_linearly_separable(10, 2, 0.5, 1), gen_linearly_separable(10, 2, 0.5, 2));
  EXPECT_THROW((void)gen_linearly_separable(10, 2, 0.0, 1), std::invalid_argument);
  EXPECT_THROW((void)gen_linearly_separable(10, 2, 2.5, 1), std::invalid_argument);
}

TEST(PolySeparable, Contract) {
  for (int degree = 1; degree <= 3; ++degree) {
    const auto data = gen_poly_separable(30, 2, degree, 5);
    ASSERT_EQ(data.size(), 30u);
    EXPECT_EQ(data.meta().degree, degree);
    EXPECT_EQ(data.meta().witness->degree(), degree);
    EXPECT_GE(*data.witness_margin(), 0.1);
    EXPECT_EQ(distinct_rows(data), 30u);
    for (double v : data.features()) EXPECT_LE(std::abs(v), 1.5);
  }
  EXPECT_THROW((void)gen_poly_separable(10, 2, 0, 1), std::invalid_argument);
}

TEST(Circles, Contract) {
  const auto data = gen_circles(33, 4);
  ASSERT_EQ(data.size(), 33u);
  int inner = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = norm(data.row(i));
    if (data.label(i) == 1) {
      ++inner;
      EXPECT_LT(r, 1.0 + 1e-12);
    } else {
      EXPECT_GT(r, 2.0);
      EXPECT_LE(r, 2.8 + 1e-12);
    }
  }
  EXPECT_EQ(inner, 17);
  EXPECT_GE(*data.witness_margin(), 1.25 - 1e-12);
}

TEST(Conflicting, ContractAndOracle) {
  testgen::Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const auto groups = static_cast<std::size_t>(rng.integer(1, 6));
    const auto dups = static_cast<std::size_t>(rng.integer(2, 8));
    const double flip = rng.uniform(0.0, 0.5);
    const auto data = gen_conflicting(groups, dups, flip, static_cast<std::uint64_t>(trial));
    ASSERT_EQ(data.size(), groups * dups);
    EXPECT_EQ(distinct_rows(data), groups);
    ASSERT_TRUE(data.meta().min_error.has_value());
    EXPECT_DOUBLE_EQ(*data.meta().min_error, majority_vote_oracle(data));
  }
  EXPECT_EQ(majority_vote_oracle(gen_conflicting(4, 4, 0.25, 0)), 0.25);
  EXPECT_THROW((void)gen_conflicting(4, 1, 0.25, 0), std::invalid_argument);
  EXPECT_THROW((void)gen_conflicting(4, 4, 0.6, 0), std::invalid_argument);
}

TEST(FileFormat, RoundTripIsExact) {
  const auto dir = std::filesystem::temp_directory_path() / "landscape_dataset_test";
  std::filesystem::create_directories(dir);
  const std::vector<Dataset> sets{gen_xor(), gen_linearly_separable(12, 3, 0.4, 9), gen_poly_separable(10, 2, 3, 2),
                                  gen_circles(8, 1), gen_conflicting(3, 4, 0.25, 3)};
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto path = dir / ("set" + std::to_string(k) + ".csv");
    save(sets[k], path);
    EXPECT_EQ(load(path), sets[k]) << sets[k].meta().generator;
    EXPECT_EQ(from_text(to_text(sets[k])), sets[k]);
  }
  std::filesystem::remove_all(dir);
  EXPECT_THROW((void)load(dir / "missing.csv"), std::runtime_error);
}

TEST(FileFormat, RejectsMalformedText) {
  const std::string header = "# landscape-lab v1; d=2; n=1; generator=file; t=none; seed=0\n";
  EXPECT_THROW((void)from_text(""), std::runtime_error);
  EXPECT_THROW((void)from_text("x,y,label\n1,2,1\n"), std::runtime_error);
  EXPECT_THROW((void)from_text(header + "1,1\n"), std::runtime_error);
  EXPECT_THROW((void)from_text(header + "1,1,0\n"), std::runtime_error);
  EXPECT_THROW((void)from_text(header + "1,abc,1\n"), std::runtime_error);
  EXPECT_THROW((void)from_text(header + "1,1,1\n2,2,-1\n"), std::runtime_error);
  EXPECT_NO_THROW((void)from_text(header + "1,1,1\n"));
}

TEST(FormatDouble, ParsesBackExactly) {
  testgen::Rng rng(82);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.integer(-30, 30));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

}  // namespace
