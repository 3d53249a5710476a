#pragma once

#include "eba/domain.hpp"

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

namespace eba {

enum class PredictorGroup { load_size, crow_distance, date, collection_country, delivery_country };

inline constexpr std::array<PredictorGroup, 5> kAllPredictorGroups{
    PredictorGroup::load_size, PredictorGroup::crow_distance, PredictorGroup::date,
    PredictorGroup::collection_country, PredictorGroup::delivery_country};

std::string_view to_string(PredictorGroup g) noexcept;
inline bool is_categorical(PredictorGroup g) noexcept {
	return g == PredictorGroup::collection_country || g == PredictorGroup::delivery_country;
}

enum class InformationCriterion { aic, bic };

struct FeatureSpec {
	std::vector<PredictorGroup> candidates{kAllPredictorGroups.begin(), kAllPredictorGroups.end()};
	int rare_threshold = 10; ///< categories seen fewer times merge into OTHER
	double z_cap = 3.0;      ///< numeric outlier clamp, in standard deviations
	InformationCriterion criterion = InformationCriterion::bic;
	double grid_degrees = 5.0; ///< cell size for coordinate-derived country labels

	void validate() const;
};

inline constexpr std::string_view kOtherCategory = "OTHER";

/// Country label of a job endpoint; falls back to a coarse coordinate cell when unlabeled.
std::string country_label(const JobRecord &job, PredictorGroup which, double grid_degrees = 5.0);

/// Levels of one categorical predictor; OTHER is always the last level.
struct CategoryDictionary {
	std::vector<std::string> levels;
	std::vector<std::size_t> counts; ///< training frequency per level

	std::size_t index_of(std::string_view label) const noexcept;
	static CategoryDictionary build(std::span<const std::string> labels, int rare_threshold);
};

/// Fit-time encoding state: category dictionaries and numeric clamp bounds.
struct FeatureEncoder {
	CategoryDictionary collection;
	CategoryDictionary delivery;
	std::array<double, 3> low{};  ///< load, crow km, date
	std::array<double, 3> high{};
	double grid_degrees = 5.0;

	static FeatureEncoder fit(std::span<const JobRecord> jobs, const FeatureSpec &spec);
};

/// [load, crow km, date, one-hot collection levels, one-hot delivery levels]; numeric values are raw.
Eigen::VectorXd build_features(const JobRecord &job, const FeatureSpec &spec, const FeatureEncoder &encoder);

/// Clamps values outside mean +/- z_cap * sd (sample sd). Columns shorter than 3 are returned unchanged.
std::vector<double> trim_outliers(std::span<const double> column, double z_cap);
/// The clamp interval trim_outliers would use; infinite bounds when n < 3.
std::pair<double, double> trim_bounds(std::span<const double> column, double z_cap);

/// One design-matrix column: a numeric group, or one non-reference level of a categorical group.
struct DesignColumn {
	PredictorGroup group = PredictorGroup::load_size;
	std::size_t level = 0; ///< categorical level index; unused for numeric groups
	std::string name;
};

struct StepRecord {
	std::string added; ///< empty for the intercept-only start
	double aic = 0.0;
	double bic = 0.0;
	double rss = 0.0;
	std::size_t parameters = 0;
};

struct LinearModel {
	FeatureSpec spec;
	FeatureEncoder encoder;
	std::vector<PredictorGroup> groups; ///< in order of entry
	std::vector<DesignColumn> columns;   ///< excludes the intercept
	double intercept = 0.0;
	Eigen::VectorXd coefficients;
	double intercept_se = 0.0;
	Eigen::VectorXd standard_errors;
	double aic = 0.0;
	double bic = 0.0;
	double rss = 0.0;
	std::size_t n = 0;
	std::vector<StepRecord> steps;
	std::vector<std::string> warnings;
};

/// Forward stepwise least squares on cost_eur. Each step adds the whole predictor group that most
/// lowers the configured information criterion; stops when no group lowers it. Needs >= 10 jobs.
LinearModel fit_stepwise(std::span<const JobRecord> jobs, const FeatureSpec &spec = {});

double predict(const LinearModel &model, const JobRecord &job);
std::vector<double> predict(const LinearModel &model, std::span<const JobRecord> jobs);

/// Smaller of two estimates; a non-positive or non-finite input is ignored. Throws if both are.
double combine_min(double analogy_estimate, double regression_estimate);

} // namespace eba
