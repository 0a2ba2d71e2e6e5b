// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mmwpl/config.hpp"
#include "mmwpl/default_config.hpp"
#include "mmwpl/random.hpp"
#include "support.hpp"

using namespace mmwpl;

// ---------------------------------------------------------------- random ----

TEST(Random, SameSeedSameStream) {
  RandomStream a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Random, DerivedSeedsDependOnEveryKey) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t d = 0; d < 20; ++d)
      for (std::uint64_t k = 0; k < 3; ++k) seen.insert(derive_seed(2023, {s, d, k}));
  EXPECT_EQ(seen.size(), 4u * 20u * 3u);
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_EQ(derive_seed(9, {1, 2}), derive_seed(9, {1, 2}));
}

TEST(Random, UniformStaysInRange) {
  RandomStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 3.0);
  }
  EXPECT_EQ(rng.uniform(4.5, 4.5), 4.5);
}

TEST(Random, UniformIntIsInclusiveAndCoversRange) {
  RandomStream rng(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const auto v = rng.uniform_int(1, 5);
    ASSERT_GE(v, 1);
    ASSERT_LE(v, 5);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Random, NormalMoments) {
  RandomStream rng(11);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(std::sqrt(var), 1.0, 0.01);
}

TEST(Random, ExponentialMean) {
  RandomStream rng(5);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += rng.exponential(50.0);
  EXPECT_NEAR(s / 100000, 50.0, 1.0);
}

// ---------------------------------------------------------------- config ----

TEST(Config, ParsesSectionsKeysAndComments) {
  const auto doc = config::parse_string(
      "# comment\nversion = 1\n; other comment\n\n[season Winter]\ntemperature = 13, 27\n"
      "[channel]\nshadow_sigma = 8.0\n");
  EXPECT_EQ(doc.version, 1);
  const auto* w = doc.find("season", "Winter");
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->line, 5);
  auto r = config::get_range(*w, "temperature");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first, 13.0);
  EXPECT_EQ(r->second, 27.0);
  EXPECT_EQ(config::get_real(*doc.find("channel"), "shadow_sigma", 0.0), 8.0);
  EXPECT_EQ(config::get_real(*doc.find("channel"), "absent", 2.5), 2.5);
}

TEST(Config, VersionIsRequired) {
  EXPECT_THROW(config::parse_string("[channel]\nx = 1\n"), ConfigError);
  try {
    config::parse_string("version = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("unsupported version"), std::string::npos);
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    config::parse_string("version = 1\n[a]\nk = 1\nk = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
  try {
    config::parse_string("version = 1\n[a]\nnot a pair\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  try {
    const auto doc = config::parse_string("version = 1\n[a]\n\nk = twelve\n");
    config::get_real(*doc.find("a"), "k", 0.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(Config, DuplicateSectionRejected) {
  try {
    config::parse_string("version = 1\n[season Winter]\n[season Winter]\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("season Winter"), std::string::npos);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Config, BooleansAndLists) {
  const auto doc = config::parse_string("version = 1\n[s]\na = true\nb = off\nc = 1, 2.5 , 3\nd = maybe\n");
  const auto& s = *doc.find("s");
  EXPECT_TRUE(config::get_bool(s, "a", false));
  EXPECT_FALSE(config::get_bool(s, "b", true));
  EXPECT_EQ(config::get_reals(s, "c", {}), (std::vector<double>{1, 2.5, 3}));
  EXPECT_THROW(config::get_bool(s, "d", false), ConfigError);
}

TEST(Config, BundledDefaultMatchesConfigFile) {
  EXPECT_EQ(test::slurp(MMWPL_DEFAULT_CONF), std::string(kDefaultConfig));
}
