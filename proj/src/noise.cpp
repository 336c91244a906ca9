#include "swarm/noise.hpp"

#include <cmath>
#include <numbers>

#include "swarm/errors.hpp"

namespace swarm
{
namespace
{
constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

Philox4x32::Key split_key(std::uint64_t k)
{
    return {static_cast<std::uint32_t>(k),
            static_cast<std::uint32_t>(k >> 32)};
}

std::uint64_t join_key(Philox4x32::Key k)
{
    return (static_cast<std::uint64_t>(k[1]) << 32) | k[0];
}

Philox4x32::Counter make_counter(std::uint32_t stream, DrawTag tag,
                                 std::uint64_t step, std::uint32_t block)
{
    auto const tag_bits = static_cast<std::uint32_t>(tag) << 24;
    return {block, static_cast<std::uint32_t>(step),
            static_cast<std::uint32_t>(step >> 32) ^ tag_bits, stream};
}

// 53-bit uniform in (0, 1]
double to_unit(std::uint32_t hi, std::uint32_t lo)
{
    std::uint64_t const bits
        = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

Vec normals(Philox4x32::Key key, std::uint32_t stream, DrawTag tag,
            std::uint64_t step, int dim)
{
    Vec z;
    int filled = 0;
    for (std::uint32_t block = 0; filled < dim; ++block)
    {
        auto const r
            = Philox4x32::generate(make_counter(stream, tag, step, block), key);
        double const u1 = to_unit(r[0], r[1]);
        double const u2 = to_unit(r[2], r[3]);
        double const rad = std::sqrt(-2.0 * std::log(u1));
        double const th = 2.0 * std::numbers::pi * u2;
        z[filled++] = rad * std::cos(th);
        if (filled < dim)
            z[filled++] = rad * std::sin(th);
    }
    return z;
}

}  // namespace

//---------------------------------------------------------------------------//
Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint64_t const p0 = static_cast<std::uint64_t>(philox_m0) * ctr[0];
        std::uint64_t const p1 = static_cast<std::uint64_t>(philox_m1) * ctr[2];
        auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto const lo0 = static_cast<std::uint32_t>(p0);
        auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto const lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += philox_w0;
        key[1] += philox_w1;
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base, std::uint64_t n,
                           std::uint64_t replica)
{
    return mix64(mix64(base ^ 0x5EEDull) + mix64(n) * 31 + replica);
}

void validate(NoiseConfig const& cfg)
{
    if (!(cfg.sigma >= 0 && cfg.sigma_bar >= 0))
        throw ValidationError("noise strengths must be non-negative");
}

//---------------------------------------------------------------------------//
NoiseStreams::NoiseStreams(std::uint64_t master_seed)
    : common_key_(split_key(mix64(master_seed ^ 0xC0FFEEull)))
    , idio_key_(split_key(mix64(master_seed)))
{
}

NoiseStreams NoiseStreams::fork_idiosyncratic(std::uint64_t component) const
{
    auto const rekeyed = mix64(join_key(idio_key_) ^ mix64(component + 1));
    return NoiseStreams(common_key_, split_key(rekeyed));
}

Vec NoiseStreams::idiosyncratic_normal(std::uint32_t stream, DrawTag tag,
                                       std::uint64_t step, int dim) const
{
    return normals(idio_key_, stream, tag, step, dim);
}

Vec NoiseStreams::common_normal(DrawTag tag, std::uint64_t step, int dim) const
{
    return normals(common_key_, common_stream, tag, step, dim);
}

std::array<double, 4>
NoiseStreams::idiosyncratic_uniform(std::uint32_t stream, DrawTag tag,
                                    std::uint64_t step,
                                    std::uint32_t slot) const
{
    return keyed_uniform(idio_key_, stream, tag, step, slot);
}

void NoiseStreams::sample_increments(
    std::uint64_t step, double dt, int dim, std::span<Vec> idiosyncratic,
    Vec& common, std::span<std::uint32_t const> stream_ids) const
{
    double const scale = std::sqrt(dt);
    for (std::size_t i = 0; i < idiosyncratic.size(); ++i)
    {
        auto const id = stream_ids.empty() ? static_cast<std::uint32_t>(i)
                                           : stream_ids[i];
        idiosyncratic[i]
            = scale * idiosyncratic_normal(id, DrawTag::increment, step, dim);
    }
    common = scale * common_normal(DrawTag::increment, step, dim);
}

Vec keyed_normal(Philox4x32::Key key, std::uint32_t stream, DrawTag tag,
                 std::uint64_t step, int dim)
{
    return normals(key, stream, tag, step, dim);
}

std::array<double, 4> keyed_uniform(Philox4x32::Key key,
                                    std::uint32_t stream, DrawTag tag,
                                    std::uint64_t step, std::uint32_t slot)
{
    auto const a
        = Philox4x32::generate(make_counter(stream, tag, step, 2 * slot), key);
    auto const b = Philox4x32::generate(
        make_counter(stream, tag, step, 2 * slot + 1), key);
    return {to_unit(a[0], a[1]), to_unit(a[2], a[3]), to_unit(b[0], b[1]),
            to_unit(b[2], b[3])};
}

}  // namespace swarm
