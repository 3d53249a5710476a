#include "eba/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eba::stats {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
	if (a.size() != b.size())
		throw std::invalid_argument("length mismatch");
}

struct Moments {
	double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
	Moments m;
	m.mean_x = mean(x);
	m.mean_y = mean(y);
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double dx = x[i] - m.mean_x;
		const double dy = y[i] - m.mean_y;
		m.sxx += dx * dx;
		m.syy += dy * dy;
		m.sxy += dx * dy;
	}
	return m;
}

} // namespace

std::vector<double> ape(std::span<const double> actual, std::span<const double> estimated) {
	require_same_length(actual, estimated);
	std::vector<double> out(actual.size());
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (!(actual[i] > 0.0))
			throw std::invalid_argument("actual values must be positive");
		out[i] = 100.0 * std::abs(estimated[i] - actual[i]) / actual[i];
	}
	return out;
}

double mape(std::span<const double> actual, std::span<const double> estimated) {
	if (actual.empty())
		throw std::invalid_argument("mape of an empty series");
	return mean(ape(actual, estimated));
}

double mean(std::span<const double> values) {
	if (values.empty())
		throw std::invalid_argument("mean of an empty series");
	double s = 0.0;
	for (const double v : values)
		s += v;
	return s / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
	if (values.size() < 2)
		return 0.0;
	const double m = mean(values);
	double ss = 0.0;
	for (const double v : values)
		ss += (v - m) * (v - m);
	return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double percentile(std::span<const double> values, double p) {
	if (values.empty())
		throw std::invalid_argument("percentile of an empty series");
	if (!(p >= 0.0 && p <= 1.0))
		throw std::invalid_argument("percentile fraction must lie in [0, 1]");
	std::vector<double> sorted(values.begin(), values.end());
	std::sort(sorted.begin(), sorted.end());
	const double h = static_cast<double>(sorted.size() - 1) * p;
	const auto lo = static_cast<std::size_t>(std::floor(h));
	const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
	const double frac = h - static_cast<double>(lo);
	if (frac == 0.0)
		return sorted[lo];
	return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double student_t_cdf(double t, double dof) {
	if (std::isinf(t))
		return t > 0 ? 1.0 : 0.0;
	return boost::math::cdf(boost::math::students_t(dof), t);
}

double student_t_quantile(double p, double dof) {
	return boost::math::quantile(boost::math::students_t(dof), p);
}

MeanCI mean_ci(std::span<const double> values, double level) {
	if (values.size() < 2)
		throw std::invalid_argument("mean_ci needs at least two values");
	if (!(level > 0.0 && level < 1.0))
		throw std::invalid_argument("confidence level must lie in (0, 1)");
	MeanCI r;
	r.mean = mean(values);
	r.se = stddev(values) / std::sqrt(static_cast<double>(values.size()));
	const double half = student_t_quantile(0.5 + level / 2.0, static_cast<double>(values.size() - 1)) * r.se;
	r.low = r.mean - half;
	r.high = r.mean + half;
	return r;
}

Summary summarize(std::span<const double> values) {
	Summary s;
	s.mean = mean(values);
	s.sd = stddev(values);
	s.min = *std::min_element(values.begin(), values.end());
	s.max = *std::max_element(values.begin(), values.end());
	s.q1 = percentile(values, 0.25);
	s.median = percentile(values, 0.5);
	s.q3 = percentile(values, 0.75);
	return s;
}

ErrorStats error_stats(std::span<const double> actual, std::span<const double> estimated) {
	require_same_length(actual, estimated);
	if (actual.empty())
		throw std::invalid_argument("error_stats of an empty series");
	const std::size_t n = actual.size();
	std::vector<double> err(n), err_pct(n), abs_err(n);
	const auto abs_pct = ape(actual, estimated);
	for (std::size_t i = 0; i < n; ++i) {
		err[i] = estimated[i] - actual[i];
		err_pct[i] = 100.0 * err[i] / actual[i];
		abs_err[i] = std::abs(err[i]);
	}
	ErrorStats s;
	s.n = n;
	s.error_eur = summarize(err);
	s.error_pct = summarize(err_pct);
	s.abs_error_eur = summarize(abs_err);
	s.abs_error_pct = summarize(abs_pct);
	s.mape = s.abs_error_pct.mean;
	s.q3ape = s.abs_error_pct.q3;
	if (n >= 2) {
		const auto ci = mean_ci(abs_pct);
		s.mape_se = ci.se;
		s.mape_ci_low = ci.low;
		s.mape_ci_high = ci.high;
	} else {
		s.mape_ci_low = s.mape_ci_high = s.mape;
	}
	return s;
}

SlopeTest ols_slope_test(std::span<const double> x, std::span<const double> y) {
	require_same_length(x, y);
	if (x.size() < 3)
		throw std::invalid_argument("slope test needs at least three points");
	const auto m = moments(x, y);
	if (!(m.sxx > 0.0))
		throw std::invalid_argument("slope test needs non-constant x");

	SlopeTest r;
	r.n = x.size();
	r.dof = static_cast<double>(x.size() - 2);
	r.slope = m.sxy / m.sxx;
	r.intercept = m.mean_y - r.slope * m.mean_x;
	double sse = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double res = (y[i] - m.mean_y) - r.slope * (x[i] - m.mean_x);
		sse += res * res;
	}
	r.se = std::sqrt(sse / r.dof / m.sxx);
	const double tq = student_t_quantile(0.975, r.dof);
	if (r.se > 0.0) {
		r.t = r.slope / r.se;
		r.p_value = 2.0 * student_t_cdf(-std::abs(r.t), r.dof);
	} else if (r.slope != 0.0) {
		r.t = std::copysign(std::numeric_limits<double>::infinity(), r.slope);
		r.p_value = 0.0;
	}
	r.ci_low = r.slope - tq * r.se;
	r.ci_high = r.slope + tq * r.se;
	r.reject = r.ci_low > 0.0 || r.ci_high < 0.0;
	return r;
}

TTest paired_t_test(std::span<const double> a, std::span<const double> b, Sided sided) {
	require_same_length(a, b);
	if (a.size() < 2)
		throw std::invalid_argument("paired t test needs at least two pairs");
	std::vector<double> d(a.size());
	for (std::size_t i = 0; i < a.size(); ++i)
		d[i] = a[i] - b[i];

	TTest r;
	r.dof = static_cast<double>(d.size() - 1);
	r.mean_difference = mean(d);
	const double se = stddev(d) / std::sqrt(static_cast<double>(d.size()));
	if (se > 0.0)
		r.t = r.mean_difference / se;
	else if (r.mean_difference != 0.0)
		r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_difference);
	else
		r.t = 0.0;

	if (sided == Sided::two)
		r.p = r.t == 0.0 ? 1.0 : 2.0 * student_t_cdf(-std::abs(r.t), r.dof);
	else
		r.p = student_t_cdf(-r.t, r.dof);
	r.p = std::min(r.p, 1.0);
	return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
	require_same_length(a, b);
	if (a.size() < 2)
		throw std::invalid_argument("pearson needs at least two points");
	const auto m = moments(a, b);
	if (!(m.sxx > 0.0) || !(m.syy > 0.0))
		throw std::invalid_argument("pearson of a constant series");
	return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

} // namespace eba::stats
