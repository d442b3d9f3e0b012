// Copyright 2026 The qelm-scrambling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qelm {

/// Generator used everywhere a random stream is consumed. Always passed explicitly.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent 64-bit seed from a master seed and a tuple of tags
/// (realization index, topology, ...). Tag order matters.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = detail::splitmix64(master ^ 0x6A09E667F3BCC909ull);
    for (std::uint64_t t : tags) {
        h = detail::splitmix64(h ^ detail::splitmix64(t + 0x3C6EF372FE94F82Bull));
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x243F6A88u, 0x85A308D3u};
    return Rng(seq);
}

}  // namespace qelm
