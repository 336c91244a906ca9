#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vec.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
//! Noise strengths and master seed.
struct NoiseConfig
{
    double sigma{0.0};      //!< Idiosyncratic diffusivity
    double sigma_bar{0.0};  //!< Common diffusivity
    std::uint64_t master_seed{0};
};

void validate(NoiseConfig const& cfg);

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

//! Purpose tag mixed into the counter so draws for different uses never alias.
enum class DrawTag : std::uint32_t
{
    increment = 0,
    initial_position = 1,
    initial_velocity = 2,
    dictionary = 3,
    custom = 4,
};

//---------------------------------------------------------------------------//
/*!
 * Counter-addressed Wiener increments.
 *
 * Draw k of idiosyncratic stream i is a pure function of (key, i, k); the
 * common stream lives at the reserved index common_stream under its own key,
 * so its realization is independent of N and survives idiosyncratic forks.
 */
class NoiseStreams
{
  public:
    static constexpr std::uint32_t common_stream = 0xFFFFFFFFu;

    explicit NoiseStreams(std::uint64_t master_seed);

    //! Same common stream, idiosyncratic streams re-keyed.
    NoiseStreams fork_idiosyncratic(std::uint64_t component) const;

    //! d standard normals from an idiosyncratic stream
    Vec idiosyncratic_normal(std::uint32_t stream, DrawTag tag,
                             std::uint64_t step, int dim) const;
    //! d standard normals from the common stream
    Vec common_normal(DrawTag tag, std::uint64_t step, int dim) const;
    //! Four uniforms in (0, 1] from an idiosyncratic stream
    std::array<double, 4> idiosyncratic_uniform(std::uint32_t stream,
                                                DrawTag tag,
                                                std::uint64_t step,
                                                std::uint32_t slot) const;

    /*!
     * Increments for step k: each entry N(0, dt).
     *
     * stream_ids maps particle -> stream index (empty means identity).
     */
    void sample_increments(std::uint64_t step, double dt, int dim,
                           std::span<Vec> idiosyncratic, Vec& common,
                           std::span<std::uint32_t const> stream_ids
                           = {}) const;

    Philox4x32::Key common_key() const { return common_key_; }
    Philox4x32::Key idiosyncratic_key() const { return idio_key_; }

  private:
    NoiseStreams(Philox4x32::Key common, Philox4x32::Key idio)
        : common_key_(common), idio_key_(idio)
    {
    }

    Philox4x32::Key common_key_;
    Philox4x32::Key idio_key_;
};

//! 64-bit finalizer (splitmix64) used to derive keys and replica seeds.
std::uint64_t mix64(std::uint64_t x);

//! Deterministic seed for replica r of an experiment at particle count n.
std::uint64_t replica_seed(std::uint64_t base, std::uint64_t n,
                           std::uint64_t replica);

//! Standard normals from an arbitrary key (dictionary construction etc.).
Vec keyed_normal(Philox4x32::Key key, std::uint32_t stream, DrawTag tag,
                 std::uint64_t step, int dim);
std::array<double, 4> keyed_uniform(Philox4x32::Key key,
                                    std::uint32_t stream, DrawTag tag,
                                    std::uint64_t step, std::uint32_t slot);

}  // namespace swarm
