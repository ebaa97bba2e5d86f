#include "opgrowth/seed.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace opgrowth {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view path) {
  return splitmix64(splitmix64(master) ^ fnv1a(path));
}

Rng make_rng(std::uint64_t master, std::string_view path) {
  return Rng(derive_seed(master, path));
}

unsigned default_threads() {
  if (const char* env = std::getenv("OPGROWTH_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace opgrowth
