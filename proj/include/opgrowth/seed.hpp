#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace opgrowth {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);

// Stream seed for a named sub-experiment of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view path);
Rng make_rng(std::uint64_t master, std::string_view path);

// Thread count from OPGROWTH_THREADS, else hardware concurrency.
unsigned default_threads();

}  // namespace opgrowth
