#include "eba/synth.hpp"

#include "eba/geo.hpp"
#include "eba/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eba {

namespace {

struct City {
	const char *country;
	GeoPoint point;
};

constexpr City kCities[] = {
    {"GB", {51.5074, -0.1278}}, {"GB", {53.4808, -2.2426}}, {"NL", {51.9244, 4.4777}},
    {"DE", {53.5511, 9.9937}},  {"FR", {48.8566, 2.3522}},  {"IT", {45.4642, 9.1900}},
    {"ES", {40.4168, -3.7038}}, {"PL", {52.2297, 21.0122}}, {"NO", {59.9139, 10.7522}},
    {"CH", {47.3769, 8.5417}},  {"BE", {51.2194, 4.4025}},  {"SE", {57.7089, 11.9746}},
    {"CZ", {50.0755, 14.4378}}, {"PT", {38.7223, -9.1393}}, {"TR", {41.0082, 28.9784}},
    {"CN", {31.2304, 121.4737}}, {"US", {40.7128, -74.0060}}, {"IE", {51.8985, -8.4756}},
};
constexpr GeoPoint kDublin{53.3498, -6.2603};
constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

GeoPoint jitter(const GeoPoint &hub, double sigma_km, Rng &rng) {
	if (sigma_km == 0.0)
		return hub;
	const double dlat = rng.normal(0.0, sigma_km) / kKmPerDegree;
	const double cos_lat = std::max(std::cos(hub.lat * std::numbers::pi / 180.0), 1e-6);
	const double dlng = rng.normal(0.0, sigma_km) / (kKmPerDegree * cos_lat);
	GeoPoint p;
	p.lat = std::clamp(hub.lat + dlat, -90.0, 90.0);
	p.lng = std::remainder(hub.lng + dlng, 360.0);
	return p;
}

// Relative noise factor, redrawn until it keeps the value positive.
double noise_factor(double sigma, Rng &rng) {
	if (sigma == 0.0)
		return 1.0;
	while (true) {
		const double e = rng.normal(0.0, sigma);
		if (e > -0.9)
			return 1.0 + e;
	}
}

} // namespace

void SyntheticSpec::validate() const {
	if (lanes.empty() && n_lanes == 0 && n_jobs > 0)
		throw std::invalid_argument("a synthetic spec needs at least one lane");
	if (date_span_days < 1)
		throw std::invalid_argument("date_span_days must be positive");
	for (const double s : {jitter_km, cost_noise, margin_noise})
		if (!(s >= 0.0))
			throw std::invalid_argument("noise parameters must be non-negative");
	if (!(margin > -1.0))
		throw std::invalid_argument("margin must exceed -100%");
	double mix = 0.0;
	for (const double w : load_mixture) {
		if (!(w >= 0.0))
			throw std::invalid_argument("load mixture weights must be non-negative");
		mix += w;
	}
	if (!fixed_load && !(mix > 0.0))
		throw std::invalid_argument("load mixture weights must not all be zero");
	if (fixed_load && !(*fixed_load >= kMinLoadSize))
		throw std::invalid_argument("fixed_load below the minimum load size");
	for (const auto &l : lanes) {
		if (!l.collection.valid() || !l.delivery.valid())
			throw std::invalid_argument("lane hub coordinates out of range");
		if (!(l.weight >= 0.0) || !(l.base_rate >= 0.0) || !(l.per_km_rate >= 0.0))
			throw std::invalid_argument("lane rates and weights must be non-negative");
		if (!(l.base_rate + l.per_km_rate > 0.0))
			throw std::invalid_argument("lane rates must not both be zero");
	}
	if (!(1.0 + annual_trend * static_cast<double>(date_span_days) / 365.25 > 0.0))
		throw std::invalid_argument("annual_trend drives costs non-positive within the date span");
}

std::vector<Lane> default_lanes(std::size_t n_lanes, std::uint64_t seed) {
	constexpr std::size_t n_cities = std::size(kCities);
	std::vector<Lane> lanes;
	Rng rng(seed, 0x1a7e);
	const std::size_t offset = rng.index(n_cities);
	for (std::size_t i = 0; i < n_lanes; ++i) {
		const auto &city = kCities[(offset + i * 7) % n_cities];
		Lane lane;
		if (i % 2 == 0) {
			lane.collection = kDublin;
			lane.col_country = "IE";
			lane.delivery = city.point;
			lane.del_country = city.country;
			lane.direction = Direction::export_;
		} else {
			lane.collection = city.point;
			lane.col_country = city.country;
			lane.delivery = kDublin;
			lane.del_country = "IE";
			lane.direction = Direction::import_;
		}
		if (lane.col_country == lane.del_country)
			lane.direction = Direction::domestic;
		lane.base_rate = rng.uniform(300.0, 1500.0);
		lane.per_km_rate = rng.uniform(0.5, 2.5);
		lane.weight = 1.0;
		lanes.push_back(std::move(lane));
	}
	return lanes;
}

Dataset generate(const SyntheticSpec &spec) {
	spec.validate();
	if (spec.n_jobs == 0)
		return Dataset{};
	const auto lanes = spec.lanes.empty() ? default_lanes(spec.n_lanes, spec.seed) : spec.lanes;

	double lane_total = 0.0;
	for (const auto &l : lanes)
		lane_total += l.weight;
	if (!(lane_total > 0.0))
		throw std::invalid_argument("lane weights must not all be zero");
	const double mix_total = spec.load_mixture[0] + spec.load_mixture[1] + spec.load_mixture[2];

	Rng rng(spec.seed);
	std::vector<JobRecord> jobs;
	jobs.reserve(spec.n_jobs);
	for (std::size_t i = 0; i < spec.n_jobs; ++i) {
		double pick = rng.uniform() * lane_total;
		std::size_t li = 0;
		while (li + 1 < lanes.size() && pick >= lanes[li].weight) {
			pick -= lanes[li].weight;
			++li;
		}
		const auto &lane = lanes[li];

		JobRecord j;
		j.date = spec.start_day + static_cast<Day>(rng.index(static_cast<std::uint64_t>(spec.date_span_days)));
		if (spec.fixed_load) {
			j.load_size = *spec.fixed_load;
		} else {
			const double u = rng.uniform() * mix_total;
			if (u < spec.load_mixture[0])
				j.load_size = rng.uniform(kMinLoadSize, 1.0 / 26.0);
			else if (u < spec.load_mixture[0] + spec.load_mixture[1])
				j.load_size = rng.uniform(1.0 / 26.0, 0.5);
			else
				j.load_size = rng.uniform(0.5, 1.0);
		}
		j.collection = jitter(lane.collection, spec.jitter_km, rng);
		j.delivery = jitter(lane.delivery, spec.jitter_km, rng);
		j.direction = lane.direction;
		j.col_country = lane.col_country;
		j.del_country = lane.del_country;

		const double years = static_cast<double>(j.date - spec.start_day) / 365.25;
		const double base = lane.base_rate + lane.per_km_rate * crow_distance_km(j);
		j.cost_eur = base * std::pow(j.load_size, spec.load_exponent) * (1.0 + spec.annual_trend * years) *
		             noise_factor(spec.cost_noise, rng);
		j.revenue_eur = j.cost_eur * (1.0 + spec.margin) * noise_factor(spec.margin_noise, rng);
		j.id = i; // draw order, replaced below
		jobs.push_back(std::move(j));
	}

	std::stable_sort(jobs.begin(), jobs.end(), [](const JobRecord &a, const JobRecord &b) { return a.date < b.date; });
	for (std::size_t i = 0; i < jobs.size(); ++i)
		jobs[i].id = i + 1;
	return Dataset(std::move(jobs));
}

} // namespace eba
