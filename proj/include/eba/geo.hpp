#pragma once

#include "eba/domain.hpp"

namespace eba {

/// Mean Earth radius used for all great-circle distances.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius kEarthRadiusKm (haversine form).
double haversine_km(const GeoPoint &p1, const GeoPoint &p2) noexcept;

/// Straight-line (great-circle) distance from collection to delivery.
inline double crow_distance_km(const JobRecord &job) noexcept {
	return haversine_km(job.collection, job.delivery);
}

} // namespace eba
