#ifndef VERTSIM_COMMON_HPP
#define VERTSIM_COMMON_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace vertsim {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate seeds derived from small integers.
std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over raw bytes. Used for config digests and stage-name hashing so
// that seed derivation is stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);

// All stage seeds flow from one root seed: seed = mix(root, stage, id).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage, std::uint64_t id = 0);

// Uniform draw strictly inside (0, 1); 53-bit resolution.
double uniform_open01(Rng& rng);

// Shortest decimal form that round-trips through strtod. Keeps persisted
// files byte-stable and lossless.
std::string format_double(double v);
std::string hex64(std::uint64_t v);

std::vector<std::string> split_csv(const std::string& line);

// Runs fn(0..n-1) on up to `workers` threads. Caller guarantees the bodies
// are independent; completion order is not deterministic, result placement
// must be by index.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

} // namespace vertsim

#endif
