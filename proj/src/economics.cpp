#include "eba/economics.hpp"

#include "eba/parallel.hpp"
#include "eba/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eba {

namespace {

double draw_error(std::span<const double> dist, Rng &rng) {
	while (true) {
		const double e = dist[rng.index(dist.size())];
		if (e > -1.0)
			return e;
	}
}

void require_usable(std::span<const double> dist, const char *name) {
	if (dist.empty())
		throw std::invalid_argument(std::string(name) + " distribution is empty");
	if (std::none_of(dist.begin(), dist.end(), [](double e) { return e > -1.0 && std::isfinite(e); }))
		throw std::invalid_argument(std::string(name) + " distribution has no error above -100%");
	for (const double e : dist)
		if (!std::isfinite(e))
			throw std::invalid_argument(std::string(name) + " distribution has non-finite values");
}

struct ArmOutcome {
	double profit = 0.0;
	bool won = false;
};

// Consumes: cost, competitor errors, then the firm's error, in that order.
ArmOutcome play(Rng rng, const AuctionConfig &cfg, std::span<const double> competitors,
                std::span<const double> firm) {
	const double cost = cfg.costs[rng.index(cfg.costs.size())];
	const double markup = 1.0 + cfg.target_margin;
	double best_rival = std::numeric_limits<double>::infinity();
	for (int c = 1; c < cfg.n_bidders; ++c)
		best_rival = std::min(best_rival, cost * (1.0 + draw_error(competitors, rng)) * markup);
	const double bid = cost * (1.0 + draw_error(firm, rng)) * markup;
	if (bid < best_rival)
		return {bid - cost, true};
	return {};
}

} // namespace

ManualErrorProfile derive_manual_margin(std::span<const CostRevenue> jobs) {
	if (jobs.empty())
		throw std::invalid_argument("no jobs with revenue");
	double sum_c = 0.0, sum_r = 0.0;
	for (const auto &j : jobs) {
		if (!(j.cost > 0.0) || !std::isfinite(j.revenue))
			throw std::invalid_argument("costs must be positive and revenues finite");
		sum_c += j.cost;
		sum_r += j.revenue;
	}
	if (!(sum_r > 0.0))
		throw std::invalid_argument("total revenue must be positive");

	ManualErrorProfile p;
	p.margin = sum_r / sum_c - 1.0;
	const double markup = 1.0 + p.margin;
	std::vector<double> abs_pct;
	for (const auto &j : jobs) {
		const double e = (j.revenue - j.cost * markup) / markup;
		p.error_eur.push_back(e);
		p.error_pct.push_back(100.0 * e / j.cost);
		abs_pct.push_back(std::abs(p.error_pct.back()));
	}
	p.mean_error_pct = stats::mean(p.error_pct);
	p.mape = stats::mean(abs_pct);
	p.q3ape = stats::percentile(abs_pct, 0.75);
	p.sd_error_pct = stats::stddev(p.error_pct);
	return p;
}

ManualErrorProfile derive_manual_margin(std::span<const JobRecord> jobs) {
	std::vector<CostRevenue> cr;
	for (const auto &j : jobs)
		if (j.revenue_eur)
			cr.push_back({j.cost_eur, *j.revenue_eur});
	if (cr.empty())
		throw std::invalid_argument("no jobs with revenue");
	return derive_manual_margin(cr);
}

void AuctionConfig::validate() const {
	if (n_bidders < 2)
		throw std::invalid_argument("an auction needs at least two bidders");
	if (trials < 1)
		throw std::invalid_argument("trials must be at least 1");
	if (!(target_margin > -1.0) || !std::isfinite(target_margin))
		throw std::invalid_argument("target margin must exceed -100%");
	if (costs.empty())
		throw std::invalid_argument("cost distribution is empty");
	for (const double c : costs)
		if (!(c > 0.0) || !std::isfinite(c))
			throw std::invalid_argument("costs must be positive");
	require_usable(manual_errors, "manual error");
	require_usable(method_errors, "method error");
	if (!competitor_errors.empty())
		require_usable(competitor_errors, "competitor error");
}

IndifferenceResult simulate_indifference(const AuctionConfig &cfg) {
	cfg.validate();
	const std::span<const double> competitors =
	    cfg.competitor_errors.empty() ? std::span<const double>(cfg.manual_errors) : cfg.competitor_errors;
	const auto n = static_cast<std::size_t>(cfg.trials);

	std::vector<ArmOutcome> manual(n), method(n);
	parallel_for(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
		for (std::size_t t = begin; t < end; ++t) {
			if (cfg.common_random_numbers) {
				const Rng shared(cfg.seed, t);
				manual[t] = play(shared, cfg, competitors, cfg.manual_errors);
				method[t] = play(shared, cfg, competitors, cfg.method_errors);
			} else {
				manual[t] = play(Rng(cfg.seed, 2 * t), cfg, competitors, cfg.manual_errors);
				method[t] = play(Rng(cfg.seed, 2 * t + 1), cfg, competitors, cfg.method_errors);
			}
		}
	});

	std::vector<double> p0(n), p1(n), diff(n);
	std::size_t wins0 = 0, wins1 = 0;
	for (std::size_t t = 0; t < n; ++t) {
		p0[t] = manual[t].profit;
		p1[t] = method[t].profit;
		diff[t] = p0[t] - p1[t];
		wins0 += manual[t].won;
		wins1 += method[t].won;
	}

	IndifferenceResult r;
	r.trials = cfg.trials;
	r.profit_manual = stats::mean(p0);
	r.profit_method = stats::mean(p1);
	r.indifference_cost = r.profit_manual - r.profit_method;
	r.win_rate_manual = static_cast<double>(wins0) / static_cast<double>(n);
	r.win_rate_method = static_cast<double>(wins1) / static_cast<double>(n);
	if (n >= 2) {
		double dof = static_cast<double>(n - 1);
		if (cfg.common_random_numbers) {
			r.se = stats::stddev(diff) / std::sqrt(static_cast<double>(n));
		} else {
			const double s0 = stats::stddev(p0), s1 = stats::stddev(p1);
			r.se = std::sqrt((s0 * s0 + s1 * s1) / static_cast<double>(n));
			dof = 2.0 * static_cast<double>(n - 1);
		}
		const double half = stats::student_t_quantile(0.975, dof) * r.se;
		r.ci_low = r.indifference_cost - half;
		r.ci_high = r.indifference_cost + half;
	} else {
		r.ci_low = r.ci_high = r.indifference_cost;
	}
	return r;
}

SweepGrid sensitivity_sweep(const AuctionConfig &base, std::span<const int> bidders, std::span<const double> margins) {
	if (bidders.empty() || margins.empty())
		throw std::invalid_argument("sweep axes must be nonempty");
	SweepGrid g;
	g.bidders.assign(bidders.begin(), bidders.end());
	g.margins.assign(margins.begin(), margins.end());
	g.indifference_cost.resize(static_cast<Eigen::Index>(bidders.size()), static_cast<Eigen::Index>(margins.size()));
	for (std::size_t i = 0; i < bidders.size(); ++i) {
		for (std::size_t j = 0; j < margins.size(); ++j) {
			auto cfg = base;
			cfg.n_bidders = bidders[i];
			cfg.target_margin = margins[j];
			cfg.seed = base.seed + i * margins.size() + j;
			g.cells.push_back(simulate_indifference(cfg));
			g.indifference_cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
			    g.cells.back().indifference_cost;
		}
	}
	return g;
}

} // namespace eba
