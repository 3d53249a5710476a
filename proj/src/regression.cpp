#include "eba/regression.hpp"

#include "eba/geo.hpp"
#include "eba/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace eba {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative residual below which a column counts as a combination of earlier columns.
constexpr double kDependenceTolerance = 1e-9;
// RSS floor relative to sum(y^2); exact fits otherwise compare rounding noise.
constexpr double kRssFloor = 1e-20;

double numeric_value(const JobRecord &job, PredictorGroup g) {
	switch (g) {
	case PredictorGroup::load_size:
		return job.load_size;
	case PredictorGroup::crow_distance:
		return crow_distance_km(job);
	case PredictorGroup::date:
		return static_cast<double>(job.date);
	default:
		throw std::logic_error("not a numeric predictor");
	}
}

std::size_t numeric_slot(PredictorGroup g) {
	return static_cast<std::size_t>(g);
}

const CategoryDictionary &dictionary(const FeatureEncoder &enc, PredictorGroup g) {
	return g == PredictorGroup::collection_country ? enc.collection : enc.delivery;
}

double design_value(const JobRecord &job, const DesignColumn &col, const FeatureEncoder &enc) {
	if (!is_categorical(col.group)) {
		const auto s = numeric_slot(col.group);
		return std::clamp(numeric_value(job, col.group), enc.low[s], enc.high[s]);
	}
	const auto &dict = dictionary(enc, col.group);
	return dict.index_of(country_label(job, col.group, enc.grid_degrees)) == col.level ? 1.0 : 0.0;
}

std::vector<DesignColumn> group_columns(PredictorGroup g, const FeatureEncoder &enc) {
	if (!is_categorical(g))
		return {{g, 0, std::string(to_string(g))}};
	const auto &dict = dictionary(enc, g);
	// Most frequent level is the reference; empty levels carry no information.
	std::size_t reference = 0;
	for (std::size_t i = 1; i < dict.levels.size(); ++i)
		if (dict.counts[i] > dict.counts[reference])
			reference = i;
	std::vector<DesignColumn> cols;
	for (std::size_t i = 0; i < dict.levels.size(); ++i) {
		if (i == reference || dict.counts[i] == 0)
			continue;
		cols.push_back({g, i, std::string(to_string(g)) + "=" + dict.levels[i]});
	}
	return cols;
}

struct Fit {
	std::vector<DesignColumn> columns; // kept, excluding intercept
	Eigen::VectorXd beta;              // intercept first
	Eigen::VectorXd se;
	double rss = 0.0;
	double aic = 0.0;
	double bic = 0.0;
	std::vector<std::string> dropped;
};

Fit least_squares(std::span<const JobRecord> jobs, const Eigen::VectorXd &y, const std::vector<DesignColumn> &candidates,
                  const FeatureEncoder &enc) {
	const auto n = static_cast<Eigen::Index>(jobs.size());
	Fit fit;

	// Greedy dependence screen in column order, intercept first.
	Eigen::MatrixXd basis(n, 0);
	std::vector<Eigen::VectorXd> kept_cols;
	const auto admit = [&](const Eigen::VectorXd &c) {
		const double norm = c.norm();
		if (!(norm > 0.0))
			return false;
		Eigen::VectorXd r = c;
		for (int pass = 0; pass < 2; ++pass)
			r -= basis * (basis.transpose() * r);
		const double rn = r.norm();
		if (rn <= kDependenceTolerance * norm)
			return false;
		basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
		basis.col(basis.cols() - 1) = r / rn;
		kept_cols.push_back(c);
		return true;
	};
	admit(Eigen::VectorXd::Ones(n));
	for (const auto &col : candidates) {
		Eigen::VectorXd c(n);
		for (Eigen::Index i = 0; i < n; ++i)
			c[i] = design_value(jobs[static_cast<std::size_t>(i)], col, enc);
		if (admit(c))
			fit.columns.push_back(col);
		else
			fit.dropped.push_back(col.name);
	}

	const auto p = static_cast<Eigen::Index>(kept_cols.size());
	Eigen::MatrixXd x(n, p);
	for (Eigen::Index j = 0; j < p; ++j)
		x.col(j) = kept_cols[static_cast<std::size_t>(j)];

	const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
	fit.beta = qr.solve(y);
	fit.rss = (y - x * fit.beta).squaredNorm();

	const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
	const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
	const double sigma2 = n > p ? fit.rss / static_cast<double>(n - p) : 0.0;
	fit.se = (sigma2 * (r_inv * r_inv.transpose()).diagonal()).cwiseSqrt();

	const double nd = static_cast<double>(n);
	const double floor = std::max(kRssFloor * y.squaredNorm(), std::numeric_limits<double>::min());
	const double ll_term = nd * std::log(std::max(fit.rss, floor) / nd);
	fit.aic = ll_term + 2.0 * static_cast<double>(p);
	fit.bic = ll_term + std::log(nd) * static_cast<double>(p);
	return fit;
}

double criterion_of(const Fit &f, InformationCriterion c) {
	return c == InformationCriterion::aic ? f.aic : f.bic;
}

} // namespace

std::string_view to_string(PredictorGroup g) noexcept {
	switch (g) {
	case PredictorGroup::load_size:
		return "load_size";
	case PredictorGroup::crow_distance:
		return "crow_distance_km";
	case PredictorGroup::date:
		return "date";
	case PredictorGroup::collection_country:
		return "col_country";
	case PredictorGroup::delivery_country:
		return "del_country";
	}
	return "";
}

void FeatureSpec::validate() const {
	if (rare_threshold < 1)
		throw std::invalid_argument("rare_threshold must be at least 1");
	if (!(z_cap > 0.0))
		throw std::invalid_argument("z_cap must be positive");
	if (!(grid_degrees > 0.0))
		throw std::invalid_argument("grid_degrees must be positive");
}

std::string country_label(const JobRecord &job, PredictorGroup which, double grid_degrees) {
	const bool col = which == PredictorGroup::collection_country;
	const auto &label = col ? job.col_country : job.del_country;
	if (!label.empty())
		return label;
	const auto &p = col ? job.collection : job.delivery;
	const auto lat_cell = static_cast<long>(std::floor(p.lat / grid_degrees));
	const auto lng_cell = static_cast<long>(std::floor(p.lng / grid_degrees));
	return "grid:" + std::to_string(lat_cell) + ":" + std::to_string(lng_cell);
}

std::size_t CategoryDictionary::index_of(std::string_view label) const noexcept {
	const auto last = levels.size() - 1;
	const auto it = std::lower_bound(levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(last), label);
	if (it != levels.begin() + static_cast<std::ptrdiff_t>(last) && *it == label)
		return static_cast<std::size_t>(it - levels.begin());
	return last;
}

CategoryDictionary CategoryDictionary::build(std::span<const std::string> labels, int rare_threshold) {
	std::map<std::string, std::size_t> freq;
	for (const auto &l : labels)
		++freq[l];
	CategoryDictionary d;
	std::size_t other = 0;
	for (const auto &[label, count] : freq) {
		if (count >= static_cast<std::size_t>(rare_threshold) && label != kOtherCategory) {
			d.levels.push_back(label);
			d.counts.push_back(count);
		} else {
			other += count;
		}
	}
	d.levels.emplace_back(kOtherCategory);
	d.counts.push_back(other);
	return d;
}

std::pair<double, double> trim_bounds(std::span<const double> column, double z_cap) {
	if (column.size() < 3)
		return {-kInf, kInf};
	const double m = stats::mean(column);
	const double sd = stats::stddev(column);
	return {m - z_cap * sd, m + z_cap * sd};
}

std::vector<double> trim_outliers(std::span<const double> column, double z_cap) {
	const auto [lo, hi] = trim_bounds(column, z_cap);
	std::vector<double> out(column.begin(), column.end());
	for (auto &v : out)
		v = std::clamp(v, lo, hi);
	return out;
}

FeatureEncoder FeatureEncoder::fit(std::span<const JobRecord> jobs, const FeatureSpec &spec) {
	spec.validate();
	FeatureEncoder enc;
	enc.grid_degrees = spec.grid_degrees;
	std::vector<std::string> col_labels, del_labels;
	for (const auto &j : jobs) {
		col_labels.push_back(country_label(j, PredictorGroup::collection_country, spec.grid_degrees));
		del_labels.push_back(country_label(j, PredictorGroup::delivery_country, spec.grid_degrees));
	}
	enc.collection = CategoryDictionary::build(col_labels, spec.rare_threshold);
	enc.delivery = CategoryDictionary::build(del_labels, spec.rare_threshold);
	for (const auto g : {PredictorGroup::load_size, PredictorGroup::crow_distance, PredictorGroup::date}) {
		std::vector<double> v;
		v.reserve(jobs.size());
		for (const auto &j : jobs)
			v.push_back(numeric_value(j, g));
		const auto [lo, hi] = trim_bounds(v, spec.z_cap);
		enc.low[numeric_slot(g)] = lo;
		enc.high[numeric_slot(g)] = hi;
	}
	return enc;
}

Eigen::VectorXd build_features(const JobRecord &job, const FeatureSpec &spec, const FeatureEncoder &encoder) {
	const auto nc = static_cast<Eigen::Index>(encoder.collection.levels.size());
	const auto nd = static_cast<Eigen::Index>(encoder.delivery.levels.size());
	Eigen::VectorXd f = Eigen::VectorXd::Zero(3 + nc + nd);
	f[0] = job.load_size;
	f[1] = crow_distance_km(job);
	f[2] = static_cast<double>(job.date);
	f[3 + static_cast<Eigen::Index>(encoder.collection.index_of(
	          country_label(job, PredictorGroup::collection_country, spec.grid_degrees)))] = 1.0;
	f[3 + nc + static_cast<Eigen::Index>(encoder.delivery.index_of(
	               country_label(job, PredictorGroup::delivery_country, spec.grid_degrees)))] = 1.0;
	return f;
}

LinearModel fit_stepwise(std::span<const JobRecord> jobs, const FeatureSpec &spec) {
	spec.validate();
	if (jobs.size() < 10)
		throw std::invalid_argument("stepwise regression needs at least 10 jobs");

	LinearModel model;
	model.spec = spec;
	model.encoder = FeatureEncoder::fit(jobs, spec);
	model.n = jobs.size();

	Eigen::VectorXd y(static_cast<Eigen::Index>(jobs.size()));
	for (std::size_t i = 0; i < jobs.size(); ++i)
		y[static_cast<Eigen::Index>(i)] = jobs[i].cost_eur;

	std::vector<PredictorGroup> remaining;
	for (const auto g : spec.candidates)
		if (std::find(remaining.begin(), remaining.end(), g) == remaining.end())
			remaining.push_back(g);

	std::vector<DesignColumn> active;
	Fit current = least_squares(jobs, y, active, model.encoder);
	model.steps.push_back({"", current.aic, current.bic, current.rss, 1});

	while (!remaining.empty()) {
		std::size_t best = remaining.size();
		Fit best_fit;
		for (std::size_t gi = 0; gi < remaining.size(); ++gi) {
			auto trial_cols = active;
			const auto extra = group_columns(remaining[gi], model.encoder);
			trial_cols.insert(trial_cols.end(), extra.begin(), extra.end());
			Fit f = least_squares(jobs, y, trial_cols, model.encoder);
			if (f.columns.size() == current.columns.size())
				continue; // group adds nothing identifiable
			if (best == remaining.size() || criterion_of(f, spec.criterion) < criterion_of(best_fit, spec.criterion)) {
				best = gi;
				best_fit = std::move(f);
			}
		}
		if (best == remaining.size() ||
		    !(criterion_of(best_fit, spec.criterion) < criterion_of(current, spec.criterion)))
			break;
		model.groups.push_back(remaining[best]);
		model.steps.push_back({std::string(to_string(remaining[best])), best_fit.aic, best_fit.bic, best_fit.rss,
		                       best_fit.columns.size() + 1});
		current = std::move(best_fit);
		active = current.columns;
		remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
	}

	// Re-screen the final design so warnings reflect what was actually dropped.
	std::vector<DesignColumn> final_cols;
	for (const auto g : model.groups) {
		const auto extra = group_columns(g, model.encoder);
		final_cols.insert(final_cols.end(), extra.begin(), extra.end());
	}
	current = least_squares(jobs, y, final_cols, model.encoder);
	for (const auto &name : current.dropped)
		model.warnings.push_back("dropped degenerate column " + name);

	model.columns = current.columns;
	model.intercept = current.beta[0];
	model.intercept_se = current.se[0];
	model.coefficients = current.beta.tail(current.beta.size() - 1);
	model.standard_errors = current.se.tail(current.se.size() - 1);
	model.aic = current.aic;
	model.bic = current.bic;
	model.rss = current.rss;
	return model;
}

double predict(const LinearModel &model, const JobRecord &job) {
	double v = model.intercept;
	for (std::size_t j = 0; j < model.columns.size(); ++j)
		v += model.coefficients[static_cast<Eigen::Index>(j)] * design_value(job, model.columns[j], model.encoder);
	return v;
}

std::vector<double> predict(const LinearModel &model, std::span<const JobRecord> jobs) {
	std::vector<double> out;
	out.reserve(jobs.size());
	for (const auto &j : jobs)
		out.push_back(predict(model, j));
	return out;
}

double combine_min(double analogy_estimate, double regression_estimate) {
	const auto usable = [](double v) { return std::isfinite(v) && v > 0.0; };
	const bool a = usable(analogy_estimate);
	const bool b = usable(regression_estimate);
	if (a && b)
		return std::min(analogy_estimate, regression_estimate);
	if (a)
		return analogy_estimate;
	if (b)
		return regression_estimate;
	throw std::invalid_argument("no valid estimate to combine");
}

} // namespace eba
