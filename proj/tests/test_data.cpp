// Copyright 2026 The gxe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gxe/csv.hpp"
#include "gxe/data.hpp"
#include "gxe/error.hpp"
#include "test_util.hpp"

using namespace gxe;

namespace {

GenotypeTable genotypes_from(const std::string& text) {
  std::istringstream in(text);
  return parse_genotypes(in, "genotypes.csv");
}

std::string error_of(const std::string& text) {
  try {
    genotypes_from(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

GenotypeTable column(std::vector<std::string> calls) {
  std::vector<SnpSequence> rows;
  for (std::size_t i = 0; i < calls.size(); ++i) rows.push_back({"v" + std::to_string(i + 1), calls[i]});
  return GenotypeTable(rows);
}

EnvCovariateTable one_variable(std::vector<double> per_env) {
  std::vector<std::string> ids;
  Eigen::MatrixXd values(static_cast<Index>(per_env.size()), kPeriodCount);
  for (std::size_t e = 0; e < per_env.size(); ++e) {
    ids.push_back("e" + std::to_string(e + 1));
    values.row(static_cast<Index>(e)).setConstant(per_env[e]);
  }
  return EnvCovariateTable(ids, {"tmean"}, values);
}

}  // namespace

TEST(Csv, QuotedFieldsAndEscapes) {
  const auto f = csv::split_line(R"(a,"b,c","d""e",)");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d\"e");
  EXPECT_EQ(f[3], "");
}

TEST(Csv, RaggedRowIsRejectedWithLine) {
  std::istringstream in("a,b\n1,2\n3\n");
  try {
    csv::read(in, "x.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Csv, DoubleFormattingRoundTrips) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int i = 0; i < 200; ++i) {
    const double v = normal(rng);
    EXPECT_EQ(csv::parse_double(csv::format_double(v), "v"), v);
  }
}

TEST(Genotypes, ParsesTwoVarieties) {
  const auto t = genotypes_from("variety_id,sequence\nv1,ACGT\nv2,ACGA\n");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.marker_count(), 4u);
  EXPECT_EQ(*t.find("v2"), 1u);
}

TEST(Genotypes, LengthMismatchNamesVariety) {
  EXPECT_NE(error_of("variety_id,sequence\nv1,ACGT\nv2,ACG\n").find("length mismatch at v2"), std::string::npos);
  EXPECT_THROW(genotypes_from("variety_id,sequence\nv1,ACGT\nv2,ACG\n"), StructuralError);
}

TEST(Genotypes, UnknownSymbolReportsPosition) {
  EXPECT_NE(error_of("variety_id,sequence\nv1,ACXF\n").find("unknown symbol X at position 3"), std::string::npos);
  EXPECT_THROW(genotypes_from("variety_id,sequence\nv1,ACXF\n"), ParseError);
}

TEST(Genotypes, WideFormatMatchesSequenceFormat) {
  const auto wide = genotypes_from("variety_id,m1,m2,m3\nv1,A,C,-\nv2,R,C,T\n");
  EXPECT_EQ(wide[0].calls, "AC-");
  EXPECT_EQ(wide[1].calls, "RCT");
  EXPECT_EQ(wide.marker_name(1), "m2");
}

TEST(Genotypes, WriteThenParseRoundTrips) {
  std::mt19937_64 rng(5);
  std::vector<SnpSequence> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({"v" + std::to_string(i), fixtures::random_snps(rng, 30, 0.1)});
  const GenotypeTable t(rows);
  std::ostringstream out;
  write_genotypes(t, out);
  const auto back = genotypes_from(out.str());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back[i].calls, t[i].calls);
}

TEST(Biallelic, HeterozygoteCountsHalf) {
  const auto enc = encode_biallelic(column({"A", "A", "R"}));
  EXPECT_EQ(enc.major_allele[0], 'A');
  EXPECT_DOUBLE_EQ(enc.dosage(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(enc.dosage(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(enc.dosage(2, 0), 1.0);
}

TEST(Biallelic, TieGoesToSmallerSymbol) {
  const auto enc = encode_biallelic(column({"G", "T"}));
  EXPECT_EQ(enc.major_allele[0], 'G');
  EXPECT_DOUBLE_EQ(enc.dosage(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(enc.dosage(1, 0), 0.0);
}

TEST(Biallelic, MissingIsMeanImputed) {
  const auto enc = encode_biallelic(column({"A", "-"}));
  EXPECT_DOUBLE_EQ(enc.dosage(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(enc.dosage(1, 0), 2.0);
  const auto mixed = encode_biallelic(column({"A", "C", "A", "-"}));
  EXPECT_NEAR(mixed.dosage(3, 0), 4.0 / 3.0, 1e-15);
}

TEST(Biallelic, AllMissingMarkerIsNamed) {
  try {
    encode_biallelic(column({"A-", "C-"}));
    FAIL();
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("marker 2"), std::string::npos);
  }
}

TEST(Biallelic, PermutationEquivariantAndMatchesNaiveCount) {
  std::mt19937_64 rng(11);
  std::vector<SnpSequence> rows;
  for (int i = 0; i < 9; ++i) rows.push_back({"v" + std::to_string(i), fixtures::random_snps(rng, 40)});
  const auto enc = encode_biallelic(GenotypeTable(rows));
  std::vector<SnpSequence> shuffled = rows;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto enc2 = encode_biallelic(GenotypeTable(shuffled));
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    const auto j = std::find_if(rows.begin(), rows.end(), [&](auto& r) { return r.variety_id == shuffled[i].variety_id; }) - rows.begin();
    EXPECT_TRUE(enc2.dosage.row(static_cast<Index>(i)).isApprox(enc.dosage.row(j), 0.0));
  }
  // Column sums against a direct allele tally.
  for (Index m = 0; m < enc.dosage.cols(); ++m) {
    const char major = enc.major_allele[static_cast<std::size_t>(m)];
    double expected = 0.0;
    for (const auto& r : rows) {
      const char c = r.calls[static_cast<std::size_t>(m)];
      std::string pair;
      switch (c) {
        case 'K': pair = "GT"; break;
        case 'M': pair = "AC"; break;
        case 'R': pair = "AG"; break;
        case 'Y': pair = "CT"; break;
        default: pair = std::string(2, c);
      }
      expected += std::count(pair.begin(), pair.end(), major);
    }
    EXPECT_DOUBLE_EQ(enc.dosage.col(m).sum(), expected);
  }
}

TEST(Environment, ZScoreWithSampleSd) {
  const auto n = normalize_env(one_variable({10, 20}), {"e1", "e2"});
  // (10 - 15) / sqrt(50)
  EXPECT_NEAR(n.values()(0, 0), -std::numbers::sqrt2 / 2, 1e-12);
  EXPECT_NEAR(n.values()(1, 3), std::numbers::sqrt2 / 2, 1e-12);
}

TEST(Environment, ReferenceSetOnlyDrivesTheMap) {
  const auto n = normalize_env(one_variable({10, 20, 40}), {"e1", "e2"});
  EXPECT_NEAR(n.values()(2, 0), (40.0 - 15.0) / std::sqrt(50.0), 1e-12);
}

TEST(Environment, ConstantColumnIsCenteredWithWarning) {
  std::vector<std::string> warnings;
  const auto n = normalize_env(one_variable({5, 5, 5}), {"e1", "e2", "e3"}, &warnings);
  EXPECT_TRUE(n.values().isZero(0.0));
  EXPECT_FALSE(warnings.empty());
}

TEST(Environment, NormalizationIsIdempotent) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd raw = fixtures::random_series(rng, 8, 12) * 7.0;
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back("e" + std::to_string(i));
  const EnvCovariateTable t(ids, {"a", "b"}, raw);
  const std::vector<std::string> ref(ids.begin(), ids.begin() + 5);
  const auto once = normalize_env(t, ref);
  const auto twice = normalize_env(once, ref);
  EXPECT_LT((once.values() - twice.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Environment, LongFormatParsesAndChecksCompleteness) {
  std::string text = "environment_id,period,variable,value\n";
  for (auto p : kPeriods) text += "e1," + std::string(p) + ",t,1.5\n";
  std::istringstream in(text);
  const auto t = parse_env(in, "env.csv");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.series(0).rows(), 6);
  std::istringstream bad(text.substr(0, text.rfind("e1,")));
  EXPECT_THROW(parse_env(bad, "env.csv"), StructuralError);
  std::istringstream period("environment_id,period,variable,value\ne1,august,t,1\n");
  EXPECT_THROW(parse_env(period, "env.csv"), ParseError);
}

class AssemblyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write("genotypes.csv", "variety_id,sequence\nv1,ACGT\nv2,ACGA\n");
    std::string env = "environment_id,period,variable,value\n";
    for (const char* e : {"e1", "e2"}) {
      for (auto p : kPeriods) env += std::string(e) + "," + std::string(p) + ",t,1\n";
    }
    write("env.csv", env);
  }
  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir.path() / name) << text;
  }
  Dataset assemble(Trait trait, AssemblyReport* report = nullptr) {
    return assemble_dataset(dir.path() / "trials.csv", dir.path() / "genotypes.csv", dir.path() / "env.csv", trait,
                            report);
  }
  fixtures::TempDir dir{"assembly"};
};

TEST_F(AssemblyTest, ConsistentFilesKeepAllRecords) {
  write("trials.csv",
        "variety_id,environment_id,location,year,trait,value\nv1,e1,a,2019,yield,70\nv2,e2,b,2020,yield,75\n");
  AssemblyReport report;
  const Dataset d = assemble(Trait::yield, &report);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(report.dropped(), 0u);
  EXPECT_EQ(d.variety[1], 1u);
  EXPECT_DOUBLE_EQ(d.responses()(1), 75.0);
}

TEST_F(AssemblyTest, UnknownVarietyIsDroppedAndCounted) {
  write("trials.csv",
        "variety_id,environment_id,location,year,trait,value\nv1,e1,a,2019,yield,70\nv2,e2,b,2020,yield,75\n"
        "v9,e1,a,2019,yield,71\n");
  AssemblyReport report;
  const Dataset d = assemble(Trait::yield, &report);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(report.unknown_variety, 1u);
}

TEST_F(AssemblyTest, TraitFilter) {
  write("trials.csv",
        "variety_id,environment_id,location,year,trait,value\nv1,e1,a,2019,yield,70\nv2,e2,b,2020,yield,75\n"
        "v1,e1,a,2019,protein,12.5\nv2,e1,a,2019,protein,13.1\nv2,e2,b,2020,protein,12.9\n");
  AssemblyReport report;
  const Dataset d = assemble(Trait::protein, &report);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(report.other_trait, 2u);
  for (const auto& r : d.records) EXPECT_EQ(r.trait, Trait::protein);
}

TEST_F(AssemblyTest, EmptyJoinFails) {
  write("trials.csv", "variety_id,environment_id,location,year,trait,value\nv7,e1,a,2019,yield,70\n");
  EXPECT_THROW(assemble(Trait::yield), StructuralError);
}
