#pragma once

#include <cstdint>
#include <random>

namespace eba {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of an independent substream `index` of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Named pipeline substreams derived from one master seed.
enum class Stream : std::uint64_t { segmentation = 1, training = 2, simulation = 3, synthesis = 4 };

inline std::uint64_t derive_seed(std::uint64_t master, Stream s) noexcept {
	return substream_seed(master, 0x5eed0000ULL + static_cast<std::uint64_t>(s));
}

/// Deterministic generator. The uniform helpers avoid the implementation-defined
/// std distributions so draws are identical across standard libraries.
class Rng {
public:
	using result_type = std::uint64_t;

	explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
	Rng(std::uint64_t seed, std::uint64_t stream) : engine_(substream_seed(seed, stream)) {}

	static constexpr result_type min() { return std::mt19937_64::min(); }
	static constexpr result_type max() { return std::mt19937_64::max(); }
	result_type operator()() { return engine_(); }

	/// Uniform on [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
	/// Uniform integer on [0, n); n must be positive.
	std::uint64_t index(std::uint64_t n);
	/// Standard normal via Box-Muller (one value per call).
	double normal();
	double normal(double mean, double sd) { return mean + sd * normal(); }

private:
	std::mt19937_64 engine_;
};

} // namespace eba
