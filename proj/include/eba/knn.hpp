#pragma once

#include "eba/domain.hpp"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace eba {

/// Relative importance of each attribute in the attribute distance.
struct AttributeWeights {
	double collection = 1.0; ///< x1, applied to collection-point great-circle km
	double delivery = 1.0;   ///< x2, applied to delivery-point great-circle km
	double time = 1.0;       ///< x3, applied to squared day difference
	double load = 1.0;       ///< x4, applied to squared load-size difference

	bool valid() const noexcept;
	Eigen::Vector4d as_vector() const noexcept { return {collection, delivery, time, load}; }
	static AttributeWeights from_vector(const Eigen::Ref<const Eigen::Vector4d> &v) noexcept {
		return {v[0], v[1], v[2], v[3]};
	}
	/// Componentwise max(x, 0).
	static AttributeWeights clamped(const Eigen::Ref<const Eigen::Vector4d> &v) noexcept;

	friend bool operator==(const AttributeWeights &, const AttributeWeights &) = default;
};

/// How neighbor costs are blended.
enum class Weighting {
	as_printed,      ///< weight_i = D_i / sum D (far neighbors count more)
	inverse_distance ///< weight_i = (1/D_i) / sum (1/D)
};

std::string_view to_string(Weighting m) noexcept;
std::optional<Weighting> parse_weighting(std::string_view s) noexcept;

struct EstimatorConfig {
	int k = 5;
	AttributeWeights weights;
	Weighting mode = Weighting::as_printed;
	double exact_match_epsilon = 1e-9;

	void validate() const; ///< throws std::invalid_argument
};

struct Neighbor {
	JobId id = 0;
	double distance = 0.0;
	double normalized_cost = 0.0;

	friend bool operator==(const Neighbor &, const Neighbor &) = default;
};

/// Unweighted per-attribute terms between two jobs; the radicand is their weighted sum.
struct DistanceTerms {
	double collection_km = 0.0;
	double delivery_km = 0.0;
	double time_sq = 0.0;
	double load_sq = 0.0;
};

DistanceTerms distance_terms(const JobRecord &a, const JobRecord &b) noexcept;

// Every code path computing D goes through this expression so results agree bit for bit.
inline double weighted_radicand(const DistanceTerms &t, const AttributeWeights &w) noexcept {
	return w.collection * t.collection_km + w.delivery * t.delivery_km + w.time * t.time_sq + w.load * t.load_sq;
}

/// Attribute distance. Location terms enter the radicand unsquared.
double attribute_distance(const JobRecord &a, const JobRecord &b, const AttributeWeights &w) noexcept;

/// Keeps the k smallest candidates under the (distance, id) order.
class NeighborSelector {
public:
	explicit NeighborSelector(std::size_t k);

	void offer(const Neighbor &n);
	/// Threshold test so callers can skip building a Neighbor.
	bool admits(double distance, JobId id) const noexcept {
		if (best_.size() < k_)
			return true;
		const auto &worst = best_.back();
		return distance < worst.distance || (distance == worst.distance && id < worst.id);
	}
	std::span<const Neighbor> neighbors() const noexcept { return best_; }
	std::vector<Neighbor> take() && { return std::move(best_); }
	void reset() { best_.clear(); }

private:
	std::size_t k_;
	std::vector<Neighbor> best_; // ascending (distance, id)
};

/// The min(k, |pool|) nearest pool members sorted by (distance, id). Throws on an empty pool.
std::vector<Neighbor> nearest_neighbors(std::span<const JobRecord> pool, const JobRecord &probe,
                                        const EstimatorConfig &cfg);

struct Estimate {
	double cost = 0.0;
	bool exact_match = false;
	std::vector<Neighbor> neighbors;
};

/// Normalized-cost blend of `neighbors` times the probe load. Neighbors must be nonempty.
double blend_neighbors(std::span<const Neighbor> neighbors, double probe_load, const EstimatorConfig &cfg,
                       bool *exact_match = nullptr);

Estimate estimate_detailed(std::span<const JobRecord> pool, const JobRecord &probe, const EstimatorConfig &cfg);

/// Estimated cost in EUR for the probe. Throws std::invalid_argument("no history") on an empty pool.
double estimate_cost(std::span<const JobRecord> pool, const JobRecord &probe, const EstimatorConfig &cfg);

} // namespace eba
