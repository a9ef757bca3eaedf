#ifndef FLOODOPT_ENCODING_HPP
#define FLOODOPT_ENCODING_HPP

// Genotype <-> phenotype maps for zonal and local features.
//
// Bit significance follows b_i = floor(i / 2^i) mod 2 with i = 0 the least
// significant bit. Bit strings are stored and printed most-significant first,
// so position k of an L-bit codeword carries significance L-1-k and the text
// form reads like an ordinary binary literal ('011' is 3).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "floodopt/errors.hpp"

namespace floodopt {

class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t length) : bits_(length, 0) {}
    explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
    {
        for (auto b : bits_)
            if (b > 1)
                throw InputError("bit values must be 0 or 1");
    }

    static BitString from_string(std::string_view text)
    {
        BitString out(text.size());
        for (std::size_t k = 0; k < text.size(); ++k) {
            if (text[k] == '0')
                out.bits_[k] = 0;
            else if (text[k] == '1')
                out.bits_[k] = 1;
            else
                throw InputError("invalid character '" + std::string(1, text[k]) + "' at position " +
                                 std::to_string(k) + " of bit string");
        }
        return out;
    }

    std::string to_string() const
    {
        std::string s(bits_.size(), '0');
        for (std::size_t k = 0; k < bits_.size(); ++k)
            if (bits_[k])
                s[k] = '1';
        return s;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t k) const { return bits_[k]; }
    void set(std::size_t k, bool v) { bits_[k] = v ? 1 : 0; }
    void flip(std::size_t k) { bits_[k] ^= 1; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<const std::uint8_t> segment(std::size_t offset, std::size_t length) const
    {
        return std::span<const std::uint8_t>(bits_).subspan(offset, length);
    }
    void assign_segment(std::size_t offset, const BitString& part)
    {
        for (std::size_t k = 0; k < part.size(); ++k)
            bits_.at(offset + k) = part[k];
    }

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

inline std::size_t hamming_distance(const BitString& a, const BitString& b)
{
    if (a.size() != b.size())
        throw InputError("hamming distance of strings with different lengths");
    std::size_t d = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        d += (a[k] != b[k]);
    return d;
}

enum class Scheme { StandardBinary, Gray, Unary };

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::StandardBinary: return "binary";
    case Scheme::Gray: return "gray";
    case Scheme::Unary: return "unary";
    }
    return "?";
}

inline Scheme scheme_from_string(std::string_view s)
{
    if (s == "binary" || s == "standard_binary" || s == "standard")
        return Scheme::StandardBinary;
    if (s == "gray")
        return Scheme::Gray;
    if (s == "unary")
        return Scheme::Unary;
    throw InputError("unknown encoding scheme '" + std::string(s) + "'");
}

/// Number of distinct phenotypes an L-bit codeword can address.
inline std::uint64_t scheme_capacity(Scheme s, unsigned length)
{
    if (s == Scheme::Unary)
        return std::uint64_t{length} + 1;
    if (length >= 64)
        throw InputError("binary codewords longer than 63 bits are not supported");
    return std::uint64_t{1} << length;
}

inline BitString encode_index(std::uint64_t index, Scheme scheme, unsigned length)
{
    if (index >= scheme_capacity(scheme, length))
        throw InputError("index " + std::to_string(index) + " exceeds the capacity of a " +
                         std::to_string(length) + "-bit " + std::string(to_string(scheme)) + " codeword");
    BitString out(length);
    if (scheme == Scheme::Unary) {
        for (std::uint64_t k = 0; k < index; ++k)
            out.set(k, true);
        return out;
    }
    std::uint64_t word = index;
    if (scheme == Scheme::Gray)
        word ^= word >> 1;
    for (unsigned i = 0; i < length; ++i)
        out.set(length - 1 - i, (word >> i) & 1U);
    return out;
}

inline std::uint64_t decode_index(std::span<const std::uint8_t> bits, Scheme scheme)
{
    const auto length = bits.size();
    if (scheme == Scheme::Unary) {
        std::uint64_t ones = 0;
        for (auto b : bits)
            ones += b;
        return ones;
    }
    if (length >= 64)
        throw InputError("binary codewords longer than 63 bits are not supported");
    if (scheme == Scheme::StandardBinary) {
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < length; ++i)
            value |= std::uint64_t{bits[length - 1 - i]} << i;
        return value;
    }
    // Gray: cumulative XOR from the most significant bit down.
    std::uint64_t value = 0;
    std::uint8_t acc = 0;
    for (std::size_t k = 0; k < length; ++k) {
        acc ^= bits[k];
        value = (value << 1) | acc;
    }
    return value;
}

inline std::uint64_t decode_index(const BitString& bits, Scheme scheme)
{
    return decode_index(bits.bits(), scheme);
}

enum class CharacteristicKind { Continuous, Discrete };

/// One encoded component characteristic of a local feature (depth, area, shift...).
struct CharacteristicSpec {
    std::string name;
    CharacteristicKind kind = CharacteristicKind::Continuous;
    double x_min = 0.0;
    double x_max = 0.0;
    std::uint64_t count = 0;
    unsigned bit_length = 0;
    Scheme scheme = Scheme::Gray;
    std::vector<double> discrete_values;

    /// Continuous characteristic whose count is the full capacity of the codeword.
    static CharacteristicSpec continuous(std::string name, double x_min, double x_max, unsigned bits,
                                         Scheme scheme)
    {
        CharacteristicSpec c;
        c.name = std::move(name);
        c.kind = CharacteristicKind::Continuous;
        c.x_min = x_min;
        c.x_max = x_max;
        c.bit_length = bits;
        c.scheme = scheme;
        c.count = scheme_capacity(scheme, bits);
        c.validate();
        return c;
    }

    static CharacteristicSpec discrete(std::string name, std::vector<double> values, unsigned bits, Scheme scheme)
    {
        CharacteristicSpec c;
        c.name = std::move(name);
        c.kind = CharacteristicKind::Discrete;
        c.bit_length = bits;
        c.scheme = scheme;
        c.discrete_values = std::move(values);
        c.count = c.discrete_values.size();
        if (!c.discrete_values.empty()) {
            c.x_min = c.discrete_values.front();
            c.x_max = c.discrete_values.back();
        }
        c.validate();
        return c;
    }

    /// Spacing between consecutive members of the discrete set.
    double step() const { return (x_max - x_min) / static_cast<double>(count - 1); }

    void validate() const
    {
        if (bit_length == 0)
            throw InputError("characteristic '" + name + "' has zero bit length");
        if (count != scheme_capacity(scheme, bit_length))
            throw InputError("characteristic '" + name + "' declares " + std::to_string(count) +
                             " phenotypes but a " + std::to_string(bit_length) + "-bit " +
                             std::string(to_string(scheme)) + " codeword encodes " +
                             std::to_string(scheme_capacity(scheme, bit_length)));
        if (count < 2)
            throw InputError("characteristic '" + name + "' needs at least two phenotypes");
        if (!std::isfinite(x_min) || !std::isfinite(x_max))
            throw InputError("characteristic '" + name + "' has non-finite bounds");
        if (kind == CharacteristicKind::Discrete) {
            if (discrete_values.size() != count)
                throw InputError("characteristic '" + name + "' lists " +
                                 std::to_string(discrete_values.size()) + " values for " +
                                 std::to_string(count) + " phenotypes");
            for (std::size_t i = 1; i < discrete_values.size(); ++i)
                if (!(discrete_values[i] > discrete_values[i - 1]))
                    throw InputError("characteristic '" + name + "' values must be strictly increasing");
        } else if (!(x_max > x_min) || !(step() > 0.0)) {
            throw InputError("characteristic '" + name + "' needs x_max > x_min");
        }
    }
};

/// Three-branch clamped floor map from a continuous value to a discrete index.
inline std::uint64_t continuous_to_index(double x, const CharacteristicSpec& spec)
{
    if (!std::isfinite(x))
        throw InputError("non-finite value for characteristic '" + spec.name + "'");
    if (spec.kind != CharacteristicKind::Continuous)
        throw InputError("characteristic '" + spec.name + "' is inherently discrete");
    const double eps = spec.step();
    const double lower = spec.x_min + eps / 2.0;
    const double upper = spec.x_max - eps / 2.0;
    if (x <= lower)
        return 0;
    if (x >= upper)
        return spec.count - 1;
    const auto i = static_cast<std::uint64_t>(std::floor((x - lower) / eps)) + 1;
    return std::min(i, spec.count - 1);
}

inline double index_to_value(std::uint64_t index, const CharacteristicSpec& spec)
{
    if (index >= spec.count)
        throw InputError("index " + std::to_string(index) + " out of range for characteristic '" +
                         spec.name + "' with " + std::to_string(spec.count) + " phenotypes");
    if (spec.kind == CharacteristicKind::Discrete)
        return spec.discrete_values[index];
    return spec.x_min + static_cast<double>(index) * spec.step();
}

/// Inverse of index_to_value on the discrete set; nearest member otherwise.
/// Equidistant values resolve to the lower index.
inline std::uint64_t value_to_index(double value, const CharacteristicSpec& spec)
{
    if (!std::isfinite(value))
        throw InputError("non-finite value for characteristic '" + spec.name + "'");
    if (spec.kind == CharacteristicKind::Continuous) {
        const double pos = (value - spec.x_min) / spec.step();
        if (pos <= 0.0)
            return 0;
        const double hi = static_cast<double>(spec.count - 1);
        if (pos >= hi)
            return spec.count - 1;
        const double fl = std::floor(pos);
        return static_cast<std::uint64_t>(pos - fl > 0.5 ? fl + 1.0 : fl);
    }
    std::uint64_t best = 0;
    double best_gap = std::abs(value - spec.discrete_values[0]);
    for (std::uint64_t i = 1; i < spec.count; ++i) {
        const double gap = std::abs(value - spec.discrete_values[i]);
        if (gap < best_gap) {
            best = i;
            best_gap = gap;
        }
    }
    return best;
}

enum class FeatureStyle { Zonal, Local };

struct FeatureSpec {
    std::string id;
    FeatureStyle style = FeatureStyle::Zonal;
    std::vector<CharacteristicSpec> characteristics; // empty for zonal features

    static FeatureSpec zonal(std::string id) { return FeatureSpec{std::move(id), FeatureStyle::Zonal, {}}; }
    static FeatureSpec local(std::string id, std::vector<CharacteristicSpec> chars)
    {
        return FeatureSpec{std::move(id), FeatureStyle::Local, std::move(chars)};
    }

    std::size_t bit_length() const
    {
        if (style == FeatureStyle::Zonal)
            return 1;
        std::size_t n = 0;
        for (const auto& c : characteristics)
            n += c.bit_length;
        return n;
    }
};

/// Concatenation of every feature's codeword, with precomputed offsets.
class GenotypeLayout {
public:
    GenotypeLayout() = default;
    explicit GenotypeLayout(std::vector<FeatureSpec> features) : features_(std::move(features))
    {
        std::size_t offset = 0;
        for (const auto& f : features_) {
            if (f.style == FeatureStyle::Local) {
                if (f.characteristics.empty())
                    throw InputError("local feature '" + f.id + "' has no characteristics");
                for (const auto& c : f.characteristics)
                    c.validate();
            } else if (!f.characteristics.empty()) {
                throw InputError("zonal feature '" + f.id + "' cannot carry characteristics");
            }
            feature_offsets_.push_back(offset);
            std::vector<std::size_t> char_offsets;
            std::size_t inner = offset;
            for (const auto& c : f.characteristics) {
                char_offsets.push_back(inner);
                inner += c.bit_length;
            }
            characteristic_offsets_.push_back(std::move(char_offsets));
            offset += f.bit_length();
        }
        total_length_ = offset;
    }

    const std::vector<FeatureSpec>& features() const noexcept { return features_; }
    std::size_t feature_count() const noexcept { return features_.size(); }
    std::size_t total_length() const noexcept { return total_length_; }
    std::size_t feature_offset(std::size_t f) const { return feature_offsets_.at(f); }
    std::size_t characteristic_offset(std::size_t f, std::size_t c) const
    {
        return characteristic_offsets_.at(f).at(c);
    }

    /// Size of the genotypic search space, saturating at UINT64_MAX.
    std::uint64_t search_space_size() const
    {
        if (total_length_ >= 64)
            return std::numeric_limits<std::uint64_t>::max();
        return std::uint64_t{1} << total_length_;
    }

private:
    std::vector<FeatureSpec> features_;
    std::vector<std::size_t> feature_offsets_;
    std::vector<std::vector<std::size_t>> characteristic_offsets_;
    std::size_t total_length_ = 0;
};

/// Decoded state of one feature: inclusion flag for zonal, characteristic values for local.
struct FeatureState {
    bool included = false;
    std::vector<double> values;

    friend bool operator==(const FeatureState&, const FeatureState&) = default;
};

struct Phenotype {
    std::vector<FeatureState> features; // aligned with GenotypeLayout::features()

    friend bool operator==(const Phenotype&, const Phenotype&) = default;
};

inline Phenotype decode_genotype(const BitString& genotype, const GenotypeLayout& layout)
{
    if (genotype.size() != layout.total_length())
        throw InputError("genotype has " + std::to_string(genotype.size()) + " bits but the layout expects " +
                         std::to_string(layout.total_length()));
    Phenotype p;
    p.features.reserve(layout.feature_count());
    for (std::size_t f = 0; f < layout.feature_count(); ++f) {
        const auto& spec = layout.features()[f];
        FeatureState state;
        if (spec.style == FeatureStyle::Zonal) {
            state.included = genotype[layout.feature_offset(f)] == 1;
        } else {
            for (std::size_t c = 0; c < spec.characteristics.size(); ++c) {
                const auto& ch = spec.characteristics[c];
                const auto idx =
                    decode_index(genotype.segment(layout.characteristic_offset(f, c), ch.bit_length), ch.scheme);
                state.values.push_back(index_to_value(idx, ch));
            }
        }
        p.features.push_back(std::move(state));
    }
    return p;
}

inline BitString encode_phenotype(const Phenotype& p, const GenotypeLayout& layout)
{
    if (p.features.size() != layout.feature_count())
        throw InputError("phenotype has " + std::to_string(p.features.size()) + " features but the layout has " +
                         std::to_string(layout.feature_count()));
    BitString out(layout.total_length());
    for (std::size_t f = 0; f < layout.feature_count(); ++f) {
        const auto& spec = layout.features()[f];
        const auto& state = p.features[f];
        if (spec.style == FeatureStyle::Zonal) {
            out.set(layout.feature_offset(f), state.included);
            continue;
        }
        if (state.values.size() != spec.characteristics.size())
            throw InputError("feature '" + spec.id + "' expects " + std::to_string(spec.characteristics.size()) +
                             " characteristic values");
        for (std::size_t c = 0; c < spec.characteristics.size(); ++c) {
            const auto& ch = spec.characteristics[c];
            const double v = state.values[c];
            const auto idx = value_to_index(v, ch);
            const double snapped = index_to_value(idx, ch);
            if (std::abs(snapped - v) > 1e-9 * std::max(1.0, std::abs(v)))
                throw InputError("value " + std::to_string(v) + " of '" + spec.id + "." + ch.name +
                                 "' is not a member of its discrete set");
            out.assign_segment(layout.characteristic_offset(f, c), encode_index(idx, ch.scheme, ch.bit_length));
        }
    }
    return out;
}

/// The 'do minimum' and 'do maximum' decision vectors.
inline std::pair<BitString, BitString> build_extreme_genotypes(const GenotypeLayout& layout)
{
    BitString lo(layout.total_length());
    BitString hi(layout.total_length());
    for (std::size_t f = 0; f < layout.feature_count(); ++f) {
        const auto& spec = layout.features()[f];
        if (spec.style == FeatureStyle::Zonal) {
            hi.set(layout.feature_offset(f), true);
            continue;
        }
        for (std::size_t c = 0; c < spec.characteristics.size(); ++c) {
            const auto& ch = spec.characteristics[c];
            const auto off = layout.characteristic_offset(f, c);
            lo.assign_segment(off, encode_index(0, ch.scheme, ch.bit_length));
            hi.assign_segment(off, encode_index(ch.count - 1, ch.scheme, ch.bit_length));
        }
    }
    return {std::move(lo), std::move(hi)};
}

} // namespace floodopt

#endif
