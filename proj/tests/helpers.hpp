#pragma once

#include "eba/domain.hpp"
#include "eba/rng.hpp"

#include <vector>

namespace eba::testing {

inline JobRecord make_job(JobId id, Day date, GeoPoint col, GeoPoint del, double load, double cost) {
	JobRecord j;
	j.id = id;
	j.date = date;
	j.collection = col;
	j.delivery = del;
	j.load_size = load;
	j.cost_eur = cost;
	return j;
}

/// Jobs scattered over Europe with random dates, loads and costs. Ids are 1..n unless shuffled.
inline std::vector<JobRecord> random_jobs(std::size_t n, std::uint64_t seed, Day span = 730) {
	Rng rng(seed);
	std::vector<JobRecord> jobs;
	jobs.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		const GeoPoint col{rng.uniform(36.0, 60.0), rng.uniform(-10.0, 30.0)};
		const GeoPoint del{rng.uniform(36.0, 60.0), rng.uniform(-10.0, 30.0)};
		const double load = rng.uniform(kMinLoadSize, 1.0);
		const Day date = static_cast<Day>(rng.index(static_cast<std::uint64_t>(span)));
		jobs.push_back(make_job(i + 1, date, col, del, load, load * rng.uniform(200.0, 3000.0)));
	}
	return jobs;
}

} // namespace eba::testing
