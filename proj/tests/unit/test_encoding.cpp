#include <gtest/gtest.h>

#include <random>

#include "floodopt/encoding.hpp"
#include "floodopt/exhaustive.hpp"

using namespace floodopt;

namespace {

CharacteristicSpec depth_spec() { return CharacteristicSpec::continuous("depth", 0.0, 1.5, 2, Scheme::Gray); }

} // namespace

TEST(ContinuousToIndex, ClampedFloorBranches)
{
    const auto s = depth_spec();
    ASSERT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.step(), 0.5);
    EXPECT_EQ(continuous_to_index(0.0, s), 0u);
    EXPECT_EQ(continuous_to_index(0.7, s), 1u);
    EXPECT_EQ(continuous_to_index(9.9, s), 3u);
    EXPECT_EQ(continuous_to_index(-3.0, s), 0u);
    EXPECT_THROW(continuous_to_index(std::nan(""), s), InputError);
}

TEST(ContinuousToIndex, MonotoneAndIntoRange)
{
    const auto s = CharacteristicSpec::continuous("x", -10.0, 10.0, 4, Scheme::StandardBinary);
    std::uint64_t prev = 0;
    for (double x = -12.0; x <= 12.0; x += 0.013) {
        const auto i = continuous_to_index(x, s);
        ASSERT_LT(i, s.count);
        ASSERT_GE(i, prev);
        prev = i;
    }
}

TEST(IndexToValue, EquallySpacedAndDiscrete)
{
    const auto s = depth_spec();
    EXPECT_DOUBLE_EQ(index_to_value(0, s), 0.0);
    EXPECT_DOUBLE_EQ(index_to_value(3, s), 1.5);
    const auto d = CharacteristicSpec::discrete("area", {100, 200, 350}, 2, Scheme::Unary);
    EXPECT_DOUBLE_EQ(index_to_value(2, d), 350.0);
    EXPECT_THROW(index_to_value(3, d), InputError);
}

TEST(ValueToIndex, InverseAndNearest)
{
    const auto s = depth_spec();
    EXPECT_EQ(value_to_index(0.0 + 2 * 0.5, s), 2u);
    const auto d = CharacteristicSpec::discrete("area", {100, 200, 350}, 2, Scheme::Unary);
    EXPECT_EQ(value_to_index(240, d), 1u);
    const auto two = CharacteristicSpec::discrete("v", {100, 200}, 1, Scheme::Gray);
    EXPECT_EQ(value_to_index(150, two), 0u);
    for (std::uint64_t i = 0; i < s.count; ++i)
        EXPECT_EQ(value_to_index(index_to_value(i, s), s), i);
}

TEST(CharacteristicSpec, RejectsCapacityMismatch)
{
    EXPECT_THROW(CharacteristicSpec::discrete("v", {1, 2, 3}, 2, Scheme::Gray), InputError);
    EXPECT_THROW(CharacteristicSpec::discrete("v", {1, 3, 2}, 2, Scheme::Unary), InputError);
    EXPECT_THROW(CharacteristicSpec::continuous("v", 1.0, 1.0, 2, Scheme::Gray), InputError);
    EXPECT_THROW(CharacteristicSpec::continuous("v", 0.0, 1.0, 0, Scheme::Gray), InputError);
}

TEST(Codec, ThreeBitTableExamples)
{
    EXPECT_EQ(encode_index(3, Scheme::StandardBinary, 3).to_string(), "011");
    EXPECT_EQ(encode_index(3, Scheme::Gray, 3).to_string(), "010");
    for (Scheme s : {Scheme::StandardBinary, Scheme::Gray, Scheme::Unary}) {
        EXPECT_EQ(encode_index(0, s, 3).to_string(), "000");
        EXPECT_EQ(decode_index(BitString::from_string("000"), s), 0u);
    }
    EXPECT_EQ(decode_index(BitString::from_string("100"), Scheme::Gray), 7u);
    EXPECT_EQ(decode_index(BitString::from_string("101"), Scheme::Unary), 2u);
    EXPECT_THROW(encode_index(8, Scheme::Gray, 3), InputError);
    EXPECT_THROW(encode_index(4, Scheme::Unary, 3), InputError);
}

TEST(Codec, RoundTripAndGrayAdjacencyUpTo12Bits)
{
    for (unsigned L = 1; L <= 12; ++L) {
        const std::uint64_t n = std::uint64_t{1} << L;
        for (std::uint64_t i = 0; i < n; ++i) {
            ASSERT_EQ(decode_index(encode_index(i, Scheme::StandardBinary, L), Scheme::StandardBinary), i);
            ASSERT_EQ(decode_index(encode_index(i, Scheme::Gray, L), Scheme::Gray), i);
            if (i + 1 < n) {
                ASSERT_EQ(hamming_distance(encode_index(i, Scheme::Gray, L), encode_index(i + 1, Scheme::Gray, L)), 1u);
            }
        }
    }
}

TEST(Codec, UnaryClassSizesAreBinomial)
{
    for (unsigned L = 1; L <= 12; ++L) {
        std::vector<std::uint64_t> counts(L + 1, 0);
        for (std::uint64_t g = 0; g < (std::uint64_t{1} << L); ++g)
            ++counts[decode_index(genotype_at(g, L), Scheme::Unary)];
        std::uint64_t c = 1;
        for (unsigned k = 0; k <= L; ++k) {
            EXPECT_EQ(counts[k], c) << "L=" << L << " k=" << k;
            c = c * (L - k) / (k + 1);
        }
    }
}

TEST(BitString, ParsingAndValidation)
{
    EXPECT_EQ(BitString::from_string("0110").to_string(), "0110");
    EXPECT_THROW(BitString::from_string("01x0"), InputError);
    EXPECT_THROW(BitString(std::vector<std::uint8_t>{0, 2}), InputError);
}

namespace {

GenotypeLayout mixed_layout()
{
    return GenotypeLayout({FeatureSpec::zonal("z1"),
                           FeatureSpec::local("b1", {depth_spec(), CharacteristicSpec::continuous("area", 50, 200, 2, Scheme::Gray),
                                                     CharacteristicSpec::discrete("y", {-4, 0, 4}, 2, Scheme::Unary)}),
                           FeatureSpec::zonal("z2")});
}

} // namespace

TEST(Layout, OffsetsAndLengths)
{
    const auto l = mixed_layout();
    EXPECT_EQ(l.total_length(), 8u);
    EXPECT_EQ(l.feature_offset(1), 1u);
    EXPECT_EQ(l.characteristic_offset(1, 2), 5u);
    EXPECT_EQ(l.feature_offset(2), 7u);
    EXPECT_THROW(GenotypeLayout({FeatureSpec::local("empty", {})}), InputError);
}

TEST(Layout, DecodeAllZeroAndSingleZone)
{
    const auto l = mixed_layout();
    const auto p = decode_genotype(BitString(l.total_length()), l);
    EXPECT_FALSE(p.features[0].included);
    EXPECT_FALSE(p.features[2].included);
    EXPECT_EQ(p.features[1].values, (std::vector<double>{0.0, 50.0, -4.0}));
    const GenotypeLayout one({FeatureSpec::zonal("z")});
    EXPECT_TRUE(decode_genotype(BitString::from_string("1"), one).features[0].included);
    EXPECT_THROW(decode_genotype(BitString(3), one), InputError);
}

TEST(Layout, PhenotypeRoundTripProperty)
{
    const auto l = mixed_layout();
    std::mt19937_64 gen(5);
    for (int n = 0; n < 500; ++n) {
        BitString g(l.total_length());
        for (std::size_t k = 0; k < g.size(); ++k)
            g.set(k, gen() & 1U);
        const auto p = decode_genotype(g, l);
        const auto back = encode_phenotype(p, l);
        EXPECT_EQ(decode_genotype(back, l), p);
    }
    Phenotype excluded = decode_genotype(BitString(l.total_length()), l);
    EXPECT_EQ(encode_phenotype(excluded, l), BitString(l.total_length()));
    excluded.features[1].values[0] = 0.3;
    EXPECT_THROW(encode_phenotype(excluded, l), InputError);
}

TEST(Layout, ExtremeGenotypes)
{
    std::vector<FeatureSpec> zones;
    for (int z = 0; z < 12; ++z)
        zones.push_back(FeatureSpec::zonal("z" + std::to_string(z)));
    auto [lo, hi] = build_extreme_genotypes(GenotypeLayout(zones));
    EXPECT_EQ(lo.to_string(), "000000000000");
    EXPECT_EQ(hi.to_string(), "111111111111");

    const GenotypeLayout one({FeatureSpec::local("b", {CharacteristicSpec::continuous("depth", 0, 3.5, 3, Scheme::Gray)})});
    auto [l3, h3] = build_extreme_genotypes(one);
    EXPECT_EQ(l3.to_string(), "000");
    EXPECT_EQ(h3.to_string(), encode_index(7, Scheme::Gray, 3).to_string());
    EXPECT_EQ(h3.to_string(), "100");

    auto [le, he] = build_extreme_genotypes(GenotypeLayout{});
    EXPECT_TRUE(le.empty());
    EXPECT_TRUE(he.empty());
}

TEST(Layout, MaximalIndicesDecodeToLastValue)
{
    const auto l = mixed_layout();
    const auto hi = build_extreme_genotypes(l).second;
    const auto p = decode_genotype(hi, l);
    EXPECT_TRUE(p.features[0].included);
    EXPECT_EQ(p.features[1].values, (std::vector<double>{1.5, 200.0, 4.0}));
}
