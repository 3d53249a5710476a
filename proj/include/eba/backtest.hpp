#pragma once

#include "eba/domain.hpp"
#include "eba/knn.hpp"
#include "eba/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eba {

struct TrialConfig {
	std::string label = "trial";
	int k = 5;
	AttributeWeights weights; ///< trained weights, or all ones for the untrained trial
	Weighting mode = Weighting::as_printed;
	int lag_days = 30;
	bool include_estimated_test_jobs = false;
	double exact_match_epsilon = 1e-9;
	std::uint64_t seed = 0;
	unsigned workers = 1;

	void validate() const;
	EstimatorConfig estimator() const;
};

struct TrialRow {
	JobId id = 0;
	Day date = 0;
	double load_size = 0.0;
	double estimate = 0.0;
	double actual = 0.0;
	double error_eur = 0.0; ///< estimate - actual
	double error_pct = 0.0;
	double ape = 0.0;       ///< percent
	std::size_t pool_size = 0;
	bool underfilled = false;
	bool exact_match = false;
	bool outlier = false;
	std::vector<JobId> neighbors;
};

struct SkippedJob {
	JobId id = 0;
	Day date = 0;
	std::string reason;
};

struct SegmentRow {
	std::string name;
	std::size_t n = 0;
	double mape = 0.0;
	double se = 0.0;
	double ci_low = 0.0;
	double ci_high = 0.0;
};

struct SegmentTables {
	std::vector<SegmentRow> load_size;
	std::vector<SegmentRow> delivery_region;
	std::vector<SegmentRow> collection_region;
};

struct WeekPoint {
	std::int64_t week = 0;
	std::size_t n = 0;
	double mape = 0.0;
};

struct WeeklySeries {
	std::vector<WeekPoint> points;
	std::vector<JobId> outliers;
};

struct TrialReport {
	TrialConfig config;
	std::vector<TrialRow> rows; ///< ascending (date, id)
	std::vector<SkippedJob> skipped;
	stats::ErrorStats overall;
	std::optional<stats::ErrorStats> excluding_outliers;
	SegmentTables segments;
	std::optional<stats::SlopeTest> trend;
	WeeklySeries weekly;
};

/// Walk-forward estimation of the test set. Each probe sees only knowledge-pool jobs dated at
/// least `lag_days` before it. Probes with no eligible history are skipped; pools smaller than k
/// are used and flagged. Throws std::invalid_argument for an empty test set.
TrialReport run_trial(const Segmentation &segmentation, const Dataset &dataset, const TrialConfig &cfg);

/// Load-size (thresholds 1/26 and 0.5 container) and region classes of the report rows.
SegmentTables segment_error_report(const TrialReport &report, const Dataset &dataset, double grid_degrees = 5.0);

/// OLS of APE on date.
stats::SlopeTest trend_test(const TrialReport &report);

/// Weekly MAPE buckets from the first row date; outliers have APE > median + 10 IQR.
WeeklySeries weekly_mape_series(const TrialReport &report);

struct Comparison {
	int k = 0;
	std::size_t n = 0;
	double mape_trained = 0.0;
	double mape_untrained = 0.0;
	stats::TTest test;
	bool reject = false;
	std::string conclusion;
};

/// Paired t test of untrained vs trained APE per job. Throws if the job id sets differ.
Comparison compare_reports(const TrialReport &trained, const TrialReport &untrained,
                           stats::Sided sided = stats::Sided::b_less_than_a);

enum class Region { ireland, united_kingdom, other_eu, other_europe, rest_of_world };

std::string_view to_string(Region r) noexcept;
/// Region of a country label (ISO alpha-2) or, for coordinate-derived labels, of the point itself.
Region region_of(std::string_view country, const GeoPoint &point);

} // namespace eba
