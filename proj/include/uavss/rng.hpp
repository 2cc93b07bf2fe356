// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace uavss
{

using Engine = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mix.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/*!
 * Seed of substream `index` within family `family` of a master seed.
 *
 * Each Monte Carlo trial draws from its own substream, so estimates do not
 * depend on how trials are distributed over workers.
 */
constexpr std::uint64_t
substream_seed(std::uint64_t master, std::uint64_t family, std::uint64_t index)
{
    return splitmix64(splitmix64(splitmix64(master) ^ family) + index);
}

inline Engine
make_substream(std::uint64_t master, std::uint64_t family, std::uint64_t index)
{
    return Engine{substream_seed(master, family, index)};
}

}  // namespace uavss
