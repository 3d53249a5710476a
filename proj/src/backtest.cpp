#include "eba/backtest.hpp"

#include "eba/parallel.hpp"
#include "eba/regression.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace eba {

namespace {

constexpr double kOutlierIqrMultiple = 10.0;

bool by_date_id(const JobRecord &a, const JobRecord &b) {
	return a.date != b.date ? a.date < b.date : a.id < b.id;
}

SegmentRow segment_row(std::string name, const std::vector<double> &apes) {
	SegmentRow r;
	r.name = std::move(name);
	r.n = apes.size();
	if (apes.empty())
		return r;
	r.mape = stats::mean(apes);
	if (apes.size() >= 2) {
		const auto ci = stats::mean_ci(apes);
		r.se = ci.se;
		r.ci_low = ci.low;
		r.ci_high = ci.high;
	} else {
		r.ci_low = r.ci_high = r.mape;
	}
	return r;
}

bool in_box(const GeoPoint &p, double lat_lo, double lat_hi, double lng_lo, double lng_hi) {
	return p.lat >= lat_lo && p.lat <= lat_hi && p.lng >= lng_lo && p.lng <= lng_hi;
}

} // namespace

void TrialConfig::validate() const {
	estimator().validate();
	if (lag_days < 0)
		throw std::invalid_argument("lag_days must be non-negative");
}

EstimatorConfig TrialConfig::estimator() const {
	EstimatorConfig e;
	e.k = k;
	e.weights = weights;
	e.mode = mode;
	e.exact_match_epsilon = exact_match_epsilon;
	return e;
}

TrialReport run_trial(const Segmentation &segmentation, const Dataset &dataset, const TrialConfig &cfg) {
	cfg.validate();
	if (segmentation.test.empty())
		throw std::invalid_argument("empty test set");

	auto tests = dataset.select(segmentation.test);
	std::sort(tests.begin(), tests.end(), by_date_id);

	std::vector<JobRecord> knowledge = dataset.select(segmentation.historical);
	const auto training = dataset.select(segmentation.training);
	knowledge.insert(knowledge.end(), training.begin(), training.end());
	const std::set<JobId> test_ids(segmentation.test.begin(), segmentation.test.end());
	if (cfg.include_estimated_test_jobs)
		knowledge.insert(knowledge.end(), tests.begin(), tests.end());
	std::sort(knowledge.begin(), knowledge.end(), by_date_id);

	const auto estimator = cfg.estimator();
	std::vector<std::optional<TrialRow>> slots(tests.size());

	parallel_for(tests.size(), cfg.workers, [&](std::size_t begin, std::size_t end) {
		std::vector<JobRecord> filtered;
		for (std::size_t i = begin; i < end; ++i) {
			const auto &probe = tests[i];
			const Day cutoff = probe.date - cfg.lag_days;
			const auto prefix_end = std::upper_bound(knowledge.begin(), knowledge.end(), cutoff,
			                                         [](Day d, const JobRecord &j) { return d < j.date; });
			std::span<const JobRecord> pool(knowledge.data(), static_cast<std::size_t>(prefix_end - knowledge.begin()));
			if (cfg.include_estimated_test_jobs && cfg.lag_days == 0) {
				// Same-day test jobs are only known once estimated, i.e. earlier in (date, id) order.
				filtered.clear();
				for (const auto &j : pool)
					if (!test_ids.contains(j.id) || by_date_id(j, probe))
						filtered.push_back(j);
				pool = filtered;
			}
			if (pool.empty())
				continue;

			const auto e = estimate_detailed(pool, probe, estimator);
			TrialRow row;
			row.id = probe.id;
			row.date = probe.date;
			row.load_size = probe.load_size;
			row.estimate = e.cost;
			row.actual = probe.cost_eur;
			row.error_eur = e.cost - probe.cost_eur;
			row.error_pct = 100.0 * row.error_eur / probe.cost_eur;
			row.ape = std::abs(row.error_pct);
			row.pool_size = pool.size();
			row.underfilled = pool.size() < static_cast<std::size_t>(cfg.k);
			row.exact_match = e.exact_match;
			for (const auto &n : e.neighbors)
				row.neighbors.push_back(n.id);
			slots[i] = std::move(row);
		}
	});

	TrialReport report;
	report.config = cfg;
	for (std::size_t i = 0; i < tests.size(); ++i) {
		if (slots[i])
			report.rows.push_back(std::move(*slots[i]));
		else
			report.skipped.push_back({tests[i].id, tests[i].date, "no eligible history"});
	}
	if (report.rows.empty())
		return report;

	report.weekly = weekly_mape_series(report);
	const std::set<JobId> outliers(report.weekly.outliers.begin(), report.weekly.outliers.end());
	std::vector<double> actual, estimate, actual_kept, estimate_kept;
	for (auto &row : report.rows) {
		row.outlier = outliers.contains(row.id);
		actual.push_back(row.actual);
		estimate.push_back(row.estimate);
		if (!row.outlier) {
			actual_kept.push_back(row.actual);
			estimate_kept.push_back(row.estimate);
		}
	}
	report.overall = stats::error_stats(actual, estimate);
	if (!actual_kept.empty())
		report.excluding_outliers = stats::error_stats(actual_kept, estimate_kept);
	report.segments = segment_error_report(report, dataset);
	if (report.rows.size() >= 3) {
		const bool varied_dates = report.rows.front().date != report.rows.back().date;
		if (varied_dates)
			report.trend = trend_test(report);
	}
	return report;
}

std::string_view to_string(Region r) noexcept {
	switch (r) {
	case Region::ireland:
		return "Ireland";
	case Region::united_kingdom:
		return "United Kingdom";
	case Region::other_eu:
		return "Other European Union";
	case Region::other_europe:
		return "Other Europe";
	case Region::rest_of_world:
		return "Rest of the World";
	}
	return "";
}

Region region_of(std::string_view country, const GeoPoint &point) {
	static const std::set<std::string_view> eu{"AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR",
	                                           "DE", "GR", "EL", "HU", "IT", "LV", "LT", "LU", "MT", "NL",
	                                           "PL", "PT", "RO", "SK", "SI", "ES", "SE"};
	static const std::set<std::string_view> other_europe{"AL", "AD", "AM", "AZ", "BY", "BA", "FO", "GE",
	                                                     "GI", "IS", "XK", "LI", "MD", "MC", "ME", "MK",
	                                                     "NO", "RU", "SM", "RS", "CH", "TR", "UA", "VA"};
	if (country.starts_with("grid:")) {
		// Coordinate-derived label: classify by bounding boxes.
		if (in_box(point, 51.3, 55.5, -10.7, -5.4))
			return Region::ireland;
		if (in_box(point, 49.8, 61.0, -8.7, 2.0))
			return Region::united_kingdom;
		if (in_box(point, 34.0, 72.0, -25.0, 45.0))
			return Region::other_eu;
		return Region::rest_of_world;
	}
	if (country == "IE" || country == "GB-NIR" || country == "XI")
		return Region::ireland;
	if (country == "GB" || country == "UK")
		return Region::united_kingdom;
	if (eu.contains(country))
		return Region::other_eu;
	if (other_europe.contains(country))
		return Region::other_europe;
	return Region::rest_of_world;
}

SegmentTables segment_error_report(const TrialReport &report, const Dataset &dataset, double grid_degrees) {
	SegmentTables t;
	constexpr double one_pallet = 1.0 / 26.0;

	std::vector<double> small, medium, large;
	std::map<Region, std::vector<double>> del, col;
	std::vector<double> del_europe, col_europe, exports, imports;
	for (const auto &row : report.rows) {
		if (row.load_size < one_pallet)
			small.push_back(row.ape);
		else if (row.load_size < 0.5)
			medium.push_back(row.ape);
		else
			large.push_back(row.ape);

		const auto &job = dataset.at(row.id);
		const auto dr = region_of(country_label(job, PredictorGroup::delivery_country, grid_degrees), job.delivery);
		const auto cr =
		    region_of(country_label(job, PredictorGroup::collection_country, grid_degrees), job.collection);
		del[dr].push_back(row.ape);
		col[cr == Region::other_eu ? Region::other_europe : cr].push_back(row.ape);
		if (dr != Region::rest_of_world)
			del_europe.push_back(row.ape);
		if (cr != Region::rest_of_world)
			col_europe.push_back(row.ape);
		if (job.direction == Direction::export_)
			exports.push_back(row.ape);
		else if (job.direction == Direction::import_)
			imports.push_back(row.ape);
	}

	t.load_size.push_back(segment_row("Less than 1 standard pallet", small));
	t.load_size.push_back(segment_row("At least one standard pallet but less than half load", medium));
	t.load_size.push_back(segment_row("Half load and above", large));

	for (const auto r : {Region::ireland, Region::united_kingdom, Region::other_eu, Region::other_europe})
		t.delivery_region.push_back(segment_row(std::string(to_string(r)), del[r]));
	t.delivery_region.push_back(segment_row("Total Europe", del_europe));
	t.delivery_region.push_back(segment_row("Rest of the World", del[Region::rest_of_world]));
	t.delivery_region.push_back(segment_row("Total Export", exports));

	t.collection_region.push_back(segment_row("Ireland", col[Region::ireland]));
	t.collection_region.push_back(segment_row("United Kingdom", col[Region::united_kingdom]));
	t.collection_region.push_back(segment_row("Other Europe (inc. Other EU)", col[Region::other_europe]));
	t.collection_region.push_back(segment_row("Total Europe", col_europe));
	t.collection_region.push_back(segment_row("Rest of the World", col[Region::rest_of_world]));
	t.collection_region.push_back(segment_row("Total Import", imports));
	return t;
}

stats::SlopeTest trend_test(const TrialReport &report) {
	std::vector<double> x, y;
	for (const auto &row : report.rows) {
		x.push_back(static_cast<double>(row.date));
		y.push_back(row.ape);
	}
	return stats::ols_slope_test(x, y);
}

WeeklySeries weekly_mape_series(const TrialReport &report) {
	WeeklySeries s;
	if (report.rows.empty())
		return s;
	Day first = report.rows.front().date;
	std::vector<double> apes;
	for (const auto &row : report.rows) {
		first = std::min(first, row.date);
		apes.push_back(row.ape);
	}

	std::map<std::int64_t, std::pair<std::size_t, double>> buckets;
	for (const auto &row : report.rows) {
		const auto week = static_cast<std::int64_t>(std::floor(static_cast<double>(row.date - first) / 7.0));
		auto &b = buckets[week];
		++b.first;
		b.second += row.ape;
	}
	for (const auto &[week, b] : buckets)
		s.points.push_back({week, b.first, b.second / static_cast<double>(b.first)});

	const double median = stats::percentile(apes, 0.5);
	const double iqr = stats::percentile(apes, 0.75) - stats::percentile(apes, 0.25);
	const double limit = median + kOutlierIqrMultiple * iqr;
	for (const auto &row : report.rows)
		if (row.ape > limit)
			s.outliers.push_back(row.id);
	return s;
}

Comparison compare_reports(const TrialReport &trained, const TrialReport &untrained, stats::Sided sided) {
	std::map<JobId, double> untrained_ape;
	for (const auto &row : untrained.rows)
		untrained_ape.emplace(row.id, row.ape);
	if (untrained_ape.size() != trained.rows.size())
		throw std::invalid_argument("reports cover different jobs");

	std::vector<double> a, b;
	for (const auto &row : trained.rows) {
		const auto it = untrained_ape.find(row.id);
		if (it == untrained_ape.end())
			throw std::invalid_argument("reports cover different jobs");
		a.push_back(it->second);
		b.push_back(row.ape);
	}

	Comparison c;
	c.k = trained.config.k;
	c.n = a.size();
	c.mape_trained = stats::mean(b);
	c.mape_untrained = stats::mean(a);
	c.test = stats::paired_t_test(a, b, sided);
	c.reject = c.test.p < 0.05;
	c.conclusion = c.reject ? "Reject H0" : "Fail to reject H0";
	return c;
}

} // namespace eba
