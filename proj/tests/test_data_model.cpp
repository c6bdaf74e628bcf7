#include <gtest/gtest.h>

#include <cmath>

#include "nullboot/data_model.hpp"
#include "nullboot/errors.hpp"

using namespace nullboot;

namespace {

VariableSpec continuous(const std::string& name) { return {name, VarKind::continuous, {}, 1.0}; }
VariableSpec nominal(const std::string& name, std::vector<std::string> levels) {
    return {name, VarKind::nominal, std::move(levels), 1.0};
}

}  // namespace

TEST(VariableSpec, KindAndLevelsMustAgree) {
    EXPECT_NO_THROW(continuous("x").validate());
    EXPECT_THROW((VariableSpec{"x", VarKind::continuous, {"a"}, 1.0}.validate()), ValidationError);
    EXPECT_THROW((VariableSpec{"x", VarKind::ordinal, {}, 1.0}.validate()), ValidationError);
    EXPECT_THROW((VariableSpec{"x", VarKind::binary, {"a", "b", "c"}, 1.0}.validate()), ValidationError);
    EXPECT_THROW((VariableSpec{"x", VarKind::continuous, {}, -1.0}.validate()), ValidationError);
    EXPECT_NO_THROW((VariableSpec{"x", VarKind::binary, {"no", "yes"}, 0.0}.validate()));
}

TEST(VariableSpec, ParsesKinds) {
    EXPECT_EQ(parse_var_kind("nominal"), VarKind::nominal);
    EXPECT_EQ(to_string(VarKind::ordinal), "ordinal");
    EXPECT_THROW(parse_var_kind("interval"), ValidationError);
}

TEST(MixedDataset, RejectsInvalidCells) {
    std::vector<VariableSpec> specs{continuous("income"), nominal("housing", {"a", "b", "c"})};
    EXPECT_NO_THROW(MixedDataset(specs, 2, {1.0, 0, 2.5, 2}));
    EXPECT_THROW(MixedDataset(specs, 2, {1.0, 3, 2.5, 2}), ValidationError);
    EXPECT_THROW(MixedDataset(specs, 2, {1.0, 0.5, 2.5, 2}), ValidationError);
    EXPECT_THROW(MixedDataset(specs, 1, {1.0, 0}), ValidationError);
    EXPECT_THROW(MixedDataset(specs, 2, {1.0, 0, 2.5}), ValidationError);
    EXPECT_THROW(MixedDataset(specs, 2, {std::nan(""), 0, 2.5, 1}), ValidationError);
}

TEST(CategoricalSeriesDataset, ValidatesShape) {
    EXPECT_NO_THROW(CategoricalSeriesDataset(3, 2, 7, {{0, 1, kMissing}, {1, 1, 0}}));
    EXPECT_THROW(CategoricalSeriesDataset(3, 2, 7, {{0, 1}, {1, 1, 0}}), ValidationError);
    EXPECT_THROW(CategoricalSeriesDataset(3, 2, 7, {{0, 2, 0}}), ValidationError);
    EXPECT_THROW(CategoricalSeriesDataset(3, 2, 0, {{0, 1, 0}}), ValidationError);
}

TEST(PresenceAbsenceData, EnforcesInvariants) {
    const Adjacency adj{{1}, {0}};
    EXPECT_NO_THROW(PresenceAbsenceData({"s1", "s2"}, {"A", "B"}, {1, 0, 1, 1}, adj));
    EXPECT_THROW(PresenceAbsenceData({"s1", "s2"}, {"A", "B"}, {1, 0, 0, 0}, adj), ValidationError);
    EXPECT_THROW(PresenceAbsenceData({"s1", "s2"}, {"A", "B"}, {1, 1, 0, 1}, Adjacency{{1}, {}}), ValidationError);
    EXPECT_THROW(PresenceAbsenceData({"s1", "s2"}, {"A", "B"}, {1, 1, 0, 1}, Adjacency{{0, 1}, {0}}), ValidationError);
}

TEST(PresenceAbsenceData, RangesAndAdjacency) {
    PresenceAbsenceData d({"s1", "s2"}, {"A", "B", "C"}, {1, 0, 1, 0, 1, 0}, Adjacency{{1}, {0, 2}, {1}});
    EXPECT_EQ(d.range(0), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(d.range_size(0), 2u);
    EXPECT_TRUE(d.adjacent(1, 2));
    EXPECT_FALSE(d.adjacent(0, 2));
}

TEST(DissimilarityMatrix, ChecksInvariants) {
    EXPECT_NO_THROW(DissimilarityMatrix(2, {0, 1, 1, 0}));
    EXPECT_THROW(DissimilarityMatrix(2, {0, 1, 2, 0}), ValidationError);
    EXPECT_THROW(DissimilarityMatrix(2, {1, 1, 1, 0}), ValidationError);
    EXPECT_THROW(DissimilarityMatrix(2, {0, -1, -1, 0}), ValidationError);
    const DissimilarityMatrix d(3, {0, 1, 2, 1, 0, 3, 2, 3, 0});
    const std::vector<std::size_t> idx{2, 0};
    const auto s = d.subset(idx);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s(0, 1), 2.0);
}

TEST(Partition, ValidatesLabelsAndMedoids) {
    EXPECT_NO_THROW(Partition({0, 1, 0, kNoise}, 2));
    EXPECT_THROW(Partition({0, 0, 0}, 2), ValidationError);
    EXPECT_THROW(Partition({0, 2}, 2), ValidationError);
    EXPECT_NO_THROW(Partition({0, 1, 0}, 2, {2, 1}));
    EXPECT_THROW(Partition({0, 1, 0}, 2, {1, 2}), ValidationError);
    const Partition p({0, 1, 0, kNoise}, 2);
    EXPECT_TRUE(p.has_noise());
    EXPECT_EQ(p.cluster_sizes(), (std::vector<std::size_t>{2, 1}));
}

TEST(Partition, CompactRelabelsByFirstAppearance) {
    const Partition p = Partition::compact({5, 2, 5, kNoise, 9});
    EXPECT_EQ(p.labels(), (std::vector<int>{0, 1, 0, kNoise, 2}));
    EXPECT_EQ(p.k(), 3u);
}
