#include "eba/knn.hpp"

#include "eba/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eba {

bool AttributeWeights::valid() const noexcept {
	for (const double w : {collection, delivery, time, load})
		if (!std::isfinite(w) || w < 0.0)
			return false;
	return true;
}

AttributeWeights AttributeWeights::clamped(const Eigen::Ref<const Eigen::Vector4d> &v) noexcept {
	return from_vector(v.cwiseMax(0.0));
}

std::string_view to_string(Weighting m) noexcept {
	return m == Weighting::as_printed ? "as_printed" : "inverse_distance";
}

std::optional<Weighting> parse_weighting(std::string_view s) noexcept {
	if (s == "as_printed")
		return Weighting::as_printed;
	if (s == "inverse_distance")
		return Weighting::inverse_distance;
	return std::nullopt;
}

void EstimatorConfig::validate() const {
	if (k < 1)
		throw std::invalid_argument("k must be at least 1");
	if (!weights.valid())
		throw std::invalid_argument("attribute weights must be finite and non-negative");
	if (!(exact_match_epsilon >= 0.0))
		throw std::invalid_argument("exact_match_epsilon must be non-negative");
}

DistanceTerms distance_terms(const JobRecord &a, const JobRecord &b) noexcept {
	const double dt = static_cast<double>(b.date - a.date);
	const double dl = b.load_size - a.load_size;
	return {haversine_km(a.collection, b.collection), haversine_km(a.delivery, b.delivery), dt * dt, dl * dl};
}

double attribute_distance(const JobRecord &a, const JobRecord &b, const AttributeWeights &w) noexcept {
	return std::sqrt(weighted_radicand(distance_terms(a, b), w));
}

NeighborSelector::NeighborSelector(std::size_t k) : k_(k) {
	if (k == 0)
		throw std::invalid_argument("k must be at least 1");
	best_.reserve(k + 1);
}

void NeighborSelector::offer(const Neighbor &n) {
	if (!admits(n.distance, n.id))
		return;
	const auto pos = std::upper_bound(best_.begin(), best_.end(), n, [](const Neighbor &a, const Neighbor &b) {
		return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
	});
	best_.insert(pos, n);
	if (best_.size() > k_)
		best_.pop_back();
}

std::vector<Neighbor> nearest_neighbors(std::span<const JobRecord> pool, const JobRecord &probe,
                                        const EstimatorConfig &cfg) {
	cfg.validate();
	if (pool.empty())
		throw std::invalid_argument("no history");
	NeighborSelector selector(static_cast<std::size_t>(cfg.k));
	for (const auto &job : pool) {
		const double d = attribute_distance(probe, job, cfg.weights);
		if (selector.admits(d, job.id))
			selector.offer({job.id, d, normalized_cost(job)});
	}
	return std::move(selector).take();
}

double blend_neighbors(std::span<const Neighbor> neighbors, double probe_load, const EstimatorConfig &cfg,
                       bool *exact_match) {
	if (neighbors.empty())
		throw std::invalid_argument("no history");

	double exact_sum = 0.0;
	std::size_t exact_n = 0;
	for (const auto &n : neighbors) {
		if (n.distance <= cfg.exact_match_epsilon) {
			exact_sum += n.normalized_cost;
			++exact_n;
		}
	}
	if (exact_match)
		*exact_match = exact_n > 0;
	if (exact_n > 0)
		return exact_sum / static_cast<double>(exact_n) * probe_load;

	double total = 0.0;
	for (const auto &n : neighbors)
		total += cfg.mode == Weighting::as_printed ? n.distance : 1.0 / n.distance;
	double blended = 0.0;
	for (const auto &n : neighbors) {
		const double w = cfg.mode == Weighting::as_printed ? n.distance : 1.0 / n.distance;
		blended += (w / total) * n.normalized_cost;
	}
	return probe_load * blended;
}

Estimate estimate_detailed(std::span<const JobRecord> pool, const JobRecord &probe, const EstimatorConfig &cfg) {
	Estimate e;
	e.neighbors = nearest_neighbors(pool, probe, cfg);
	e.cost = blend_neighbors(e.neighbors, probe.load_size, cfg, &e.exact_match);
	return e;
}

double estimate_cost(std::span<const JobRecord> pool, const JobRecord &probe, const EstimatorConfig &cfg) {
	return estimate_detailed(pool, probe, cfg).cost;
}

} // namespace eba
