#pragma once

#include "eba/domain.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eba {

struct Lane {
	GeoPoint collection;
	GeoPoint delivery;
	double base_rate = 500.0;  ///< EUR per container
	double per_km_rate = 1.0;  ///< EUR per container-km
	double weight = 1.0;       ///< relative selection frequency
	Direction direction = Direction::export_;
	std::string col_country;
	std::string del_country;
};

/// Parameters of a synthetic freight log. Noise terms are relative standard deviations.
struct SyntheticSpec {
	std::size_t n_jobs = 2000;
	std::size_t n_lanes = 5; ///< lanes generated from the seed when `lanes` is empty
	std::vector<Lane> lanes;
	Day start_day = 0;
	Day date_span_days = 7 * 365;
	double jitter_km = 10.0;
	/// Weights of {parcel ~U(0.001, 1/26), pallets ~U(1/26, 0.5), full load ~U(0.5, 1)}.
	std::array<double, 3> load_mixture{0.45, 0.35, 0.20};
	std::optional<double> fixed_load; ///< overrides the mixture when set
	double load_exponent = 1.0;
	double cost_noise = 0.10;
	double annual_trend = 0.0;
	double margin = 0.151;
	double margin_noise = 0.05;
	std::uint64_t seed = 0;

	void validate() const;
};

/// Lanes used when a spec lists none: alternating exports from Dublin and imports to it.
std::vector<Lane> default_lanes(std::size_t n_lanes, std::uint64_t seed);

/// Deterministic synthetic dataset; ids run 1..n in (date, draw order).
Dataset generate(const SyntheticSpec &spec);

} // namespace eba
