#include "eba/rng.hpp"

#include <cmath>
#include <numbers>

namespace eba {

std::uint64_t mix64(std::uint64_t x) noexcept {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
	return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::index(std::uint64_t n) {
	// Rejection keeps the result unbiased.
	const std::uint64_t limit = max() - (max() % n + 1) % n;
	std::uint64_t x = engine_();
	while (x > limit)
		x = engine_();
	return x % n;
}

double Rng::normal() {
	double u1 = uniform();
	while (u1 <= 0.0)
		u1 = uniform();
	const double u2 = uniform();
	return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace eba
