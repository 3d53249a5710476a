#include "eba/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eba {

double haversine_km(const GeoPoint &p1, const GeoPoint &p2) noexcept {
	constexpr double to_rad = std::numbers::pi / 180.0;
	const double lat1 = p1.lat * to_rad;
	const double lat2 = p2.lat * to_rad;
	const double s_lat = std::sin((lat2 - lat1) / 2.0);
	const double s_lng = std::sin((p2.lng - p1.lng) * to_rad / 2.0);
	// Evaluated so that swapping the arguments yields the same bits.
	const double a = s_lat * s_lat + (std::cos(lat1) * std::cos(lat2)) * (s_lng * s_lng);
	return kEarthRadiusKm * 2.0 * std::asin(std::sqrt(std::clamp(a, 0.0, 1.0)));
}

} // namespace eba
