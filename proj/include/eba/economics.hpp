#pragma once

#include "eba/domain.hpp"
#include "eba/stats.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace eba {

struct CostRevenue {
	double cost = 0.0;
	double revenue = 0.0;
};

/// Errors implied for manual estimators who mark up their estimated cost by a common margin t.
/// With revenue R = (C + e)(1 + t) and mean(e) = 0, t = sum(R)/sum(C) - 1.
struct ManualErrorProfile {
	double margin = 0.0;
	std::vector<double> error_eur;
	std::vector<double> error_pct; ///< 100 e / C
	double mean_error_pct = 0.0;
	double mape = 0.0;
	double q3ape = 0.0;
	double sd_error_pct = 0.0;
};

ManualErrorProfile derive_manual_margin(std::span<const CostRevenue> jobs);
/// Uses the jobs that carry revenue; throws std::invalid_argument if none do.
ManualErrorProfile derive_manual_margin(std::span<const JobRecord> jobs);

struct AuctionConfig {
	int n_bidders = 3; ///< including the firm
	double target_margin = 0.151;
	int trials = 25000;
	std::uint64_t seed = 0;
	std::vector<double> costs;             ///< empirical job costs, resampled with replacement
	std::vector<double> manual_errors;     ///< signed fractional errors (estimate/actual - 1)
	std::vector<double> method_errors;     ///< signed fractional errors of the automated method
	std::vector<double> competitor_errors; ///< empty: competitors estimate like the manual arm
	bool common_random_numbers = true;
	unsigned workers = 1;

	void validate() const;
};

struct IndifferenceResult {
	double profit_manual = 0.0; ///< mean profit per bid opportunity, manual estimation
	double profit_method = 0.0; ///< same, automated estimation
	double indifference_cost = 0.0;
	double se = 0.0;
	double ci_low = 0.0;
	double ci_high = 0.0;
	double win_rate_manual = 0.0;
	double win_rate_method = 0.0;
	int trials = 0;
};

/// First-price sealed-bid auction: every bidder bids estimated cost times (1 + margin); the firm
/// wins only with the strictly lowest bid and then earns bid - true cost. Error draws at or below
/// -100% are redrawn. With common random numbers both arms share cost and competitor draws.
IndifferenceResult simulate_indifference(const AuctionConfig &cfg);

/// Hours of estimator labor worth the indifference cost at a given hourly rate.
inline double labor_hours_equivalent(double indifference_cost, double hourly_rate) {
	return indifference_cost / hourly_rate;
}

/// Irish median labor cost for industry, contracting and service workers in 2008 (EUR/hour).
inline constexpr double kReferenceHourlyRateEur = 28.29;

struct SweepGrid {
	std::vector<int> bidders;
	std::vector<double> margins;
	Eigen::MatrixXd indifference_cost; ///< rows = bidders, cols = margins
	std::vector<IndifferenceResult> cells; ///< row-major
};

/// One simulation per (bidders, margin) cell, seeded with base.seed + row-major cell index.
SweepGrid sensitivity_sweep(const AuctionConfig &base, std::span<const int> bidders, std::span<const double> margins);

} // namespace eba
