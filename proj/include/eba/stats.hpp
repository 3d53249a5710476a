#pragma once

#include <span>
#include <utility>
#include <vector>

namespace eba::stats {

/// 100 * mean(|estimated - actual| / actual). Throws on length mismatch, empty input, or actual <= 0.
double mape(std::span<const double> actual, std::span<const double> estimated);

/// Per-element absolute percentage errors (percent).
std::vector<double> ape(std::span<const double> actual, std::span<const double> estimated);

/// Linear interpolation between closest ranks; rank h = (n-1)p + 1 on the sorted values.
double percentile(std::span<const double> values, double p);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> values);

double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

struct MeanCI {
	double mean = 0.0;
	double se = 0.0;
	double low = 0.0;
	double high = 0.0;
};

/// Mean, standard error, and two-sided t confidence interval. Needs n >= 2.
MeanCI mean_ci(std::span<const double> values, double level = 0.95);

/// Location summary of one error column.
struct Summary {
	double mean = 0.0;
	double sd = 0.0;
	double min = 0.0;
	double q1 = 0.0;
	double median = 0.0;
	double q3 = 0.0;
	double max = 0.0;
};

Summary summarize(std::span<const double> values);

/// Error profile of a set of estimates against actual costs. Percent columns are relative to actual.
struct ErrorStats {
	std::size_t n = 0;
	Summary error_eur;   ///< estimate - actual
	Summary error_pct;   ///< 100 (estimate - actual) / actual
	Summary abs_error_eur;
	Summary abs_error_pct;
	double mape = 0.0;
	double q3ape = 0.0;
	double mape_se = 0.0;
	double mape_ci_low = 0.0;
	double mape_ci_high = 0.0;
};

ErrorStats error_stats(std::span<const double> actual, std::span<const double> estimated);

struct SlopeTest {
	std::size_t n = 0;
	double slope = 0.0;
	double intercept = 0.0;
	double se = 0.0;
	double t = 0.0;
	double p_value = 1.0;
	double ci_low = 0.0;
	double ci_high = 0.0;
	double dof = 0.0;
	bool reject = false; ///< 95% interval excludes zero
};

/// Least-squares slope of y on x with a two-sided t test against zero.
SlopeTest ols_slope_test(std::span<const double> x, std::span<const double> y);

enum class Sided {
	two,          ///< H1: mean(a - b) != 0
	b_less_than_a ///< H1: mean(a - b) > 0
};

struct TTest {
	double t = 0.0;
	double p = 1.0;
	double dof = 0.0;
	double mean_difference = 0.0;
};

/// Paired t test on the differences a - b.
TTest paired_t_test(std::span<const double> a, std::span<const double> b, Sided sided = Sided::two);

/// Sample Pearson correlation; throws for constant series.
double pearson(std::span<const double> a, std::span<const double> b);

} // namespace eba::stats
