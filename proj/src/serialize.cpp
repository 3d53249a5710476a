#include "eba/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <memory>
#include <stdexcept>

namespace eba {

namespace {

std::string fmt(double v) {
	std::array<char, 32> buf{};
	const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
	return std::string(buf.data(), res.ptr);
}

template <typename E, std::size_t N>
E parse_enum(const json &j, const std::array<E, N> &values, const char *what) {
	const auto s = j.get<std::string>();
	for (const E v : values)
		if (to_string(v) == s)
			return v;
	throw std::invalid_argument(std::string("unknown ") + what + ": " + s);
}

constexpr std::array kWeightings{Weighting::as_printed, Weighting::inverse_distance};
constexpr std::array kDirections{Direction::import_, Direction::export_, Direction::domestic};

std::string_view to_string(InformationCriterion c) noexcept {
	return c == InformationCriterion::aic ? "aic" : "bic";
}

json dictionary_json(const CategoryDictionary &d) {
	return {{"levels", d.levels}, {"counts", d.counts}};
}

json geo_json(const GeoPoint &p) {
	return {p.lat, p.lng};
}

GeoPoint geo_from(const json &j) {
	if (!j.is_array() || j.size() != 2)
		throw std::invalid_argument("a point is [lat, lng]");
	return {j[0].get<double>(), j[1].get<double>()};
}

json segment_rows_json(const std::vector<SegmentRow> &rows) {
	json out = json::array();
	for (const auto &r : rows)
		out.push_back(
		    {{"name", r.name}, {"n", r.n}, {"mape", r.mape}, {"se", r.se}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high}});
	return out;
}

} // namespace

void to_json(json &j, const AttributeWeights &w) {
	j = {w.collection, w.delivery, w.time, w.load};
}

void from_json(const json &j, AttributeWeights &w) {
	if (!j.is_array() || j.size() != 4)
		throw std::invalid_argument("weights must be an array of four numbers");
	w = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(json &j, const Segmentation &s) {
	j = {{"test", s.test}, {"historical", s.historical}, {"training", s.training}};
}

void from_json(const json &j, Segmentation &s) {
	j.at("test").get_to(s.test);
	j.at("historical").get_to(s.historical);
	j.at("training").get_to(s.training);
}

void to_json(json &j, const TrainedModel &m) {
	j = {{"k", m.k},
	     {"weights", m.weights},
	     {"training_mape", m.training_mape},
	     {"seed", m.seed},
	     {"mode", to_string(m.mode)},
	     {"random_search_mape", m.random_search_mape},
	     {"random_iterations", m.random_iterations},
	     {"simplex_iterations", m.simplex_iterations},
	     {"simplex_evaluations", m.simplex_evaluations},
	     {"simplex_converged", m.simplex_converged}};
}

void from_json(const json &j, TrainedModel &m) {
	m = TrainedModel{};
	j.at("k").get_to(m.k);
	j.at("weights").get_to(m.weights);
	j.at("training_mape").get_to(m.training_mape);
	j.at("seed").get_to(m.seed);
	if (j.contains("mode"))
		m.mode = parse_enum(j["mode"], kWeightings, "weighting mode");
	m.random_search_mape = j.value("random_search_mape", 0.0);
	m.random_iterations = j.value("random_iterations", 0);
	m.simplex_iterations = j.value("simplex_iterations", 0);
	m.simplex_evaluations = j.value("simplex_evaluations", 0);
	m.simplex_converged = j.value("simplex_converged", false);
}

void to_json(json &j, const SimplexOptions<double> &o) {
	j = {{"max_iterations", o.max_iterations},
	     {"x_tolerance", o.x_tolerance},
	     {"f_tolerance", o.f_tolerance},
	     {"reflection", o.reflection},
	     {"expansion", o.expansion},
	     {"contraction", o.contraction},
	     {"shrink", o.shrink}};
}

void from_json(const json &j, SimplexOptions<double> &o) {
	o.max_iterations = j.value("max_iterations", o.max_iterations);
	o.x_tolerance = j.value("x_tolerance", o.x_tolerance);
	o.f_tolerance = j.value("f_tolerance", o.f_tolerance);
	o.reflection = j.value("reflection", o.reflection);
	o.expansion = j.value("expansion", o.expansion);
	o.contraction = j.value("contraction", o.contraction);
	o.shrink = j.value("shrink", o.shrink);
}

namespace stats {

void to_json(json &j, const Summary &s) {
	j = {{"mean", s.mean}, {"sd", s.sd},         {"min", s.min}, {"q1", s.q1},
	     {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

void to_json(json &j, const ErrorStats &s) {
	j = {{"n", s.n},
	     {"mape", s.mape},
	     {"q3ape", s.q3ape},
	     {"mape_se", s.mape_se},
	     {"mape_ci", {s.mape_ci_low, s.mape_ci_high}},
	     {"error_eur", s.error_eur},
	     {"error_pct", s.error_pct},
	     {"abs_error_eur", s.abs_error_eur},
	     {"abs_error_pct", s.abs_error_pct}};
}

void to_json(json &j, const SlopeTest &s) {
	j = {{"n", s.n},          {"slope", s.slope}, {"intercept", s.intercept}, {"se", s.se},
	     {"t", s.t},          {"p_value", s.p_value}, {"ci", {s.ci_low, s.ci_high}}, {"dof", s.dof},
	     {"reject", s.reject}};
}

void to_json(json &j, const TTest &t) {
	j = {{"t", t.t}, {"p", t.p}, {"dof", t.dof}, {"mean_difference", t.mean_difference}};
}

} // namespace stats

void to_json(json &j, const TrialReport &r) {
	const auto &c = r.config;
	json rows = json::array();
	for (const auto &row : r.rows)
		rows.push_back({{"id", row.id},
		                {"date", row.date},
		                {"load_size", row.load_size},
		                {"estimate", row.estimate},
		                {"actual", row.actual},
		                {"error_eur", row.error_eur},
		                {"error_pct", row.error_pct},
		                {"ape", row.ape},
		                {"pool_size", row.pool_size},
		                {"underfilled", row.underfilled},
		                {"exact_match", row.exact_match},
		                {"outlier", row.outlier},
		                {"neighbors", row.neighbors}});
	json skipped = json::array();
	for (const auto &s : r.skipped)
		skipped.push_back({{"id", s.id}, {"date", s.date}, {"reason", s.reason}});
	json weekly = json::array();
	for (const auto &p : r.weekly.points)
		weekly.push_back({{"week", p.week}, {"n", p.n}, {"mape", p.mape}});

	j = {{"config",
	      {{"label", c.label},
	       {"k", c.k},
	       {"weights", c.weights},
	       {"mode", to_string(c.mode)},
	       {"lag_days", c.lag_days},
	       {"include_estimated_test_jobs", c.include_estimated_test_jobs},
	       {"exact_match_epsilon", c.exact_match_epsilon},
	       {"seed", c.seed}}},
	     {"overall", r.overall},
	     {"excluding_outliers", r.excluding_outliers ? json(*r.excluding_outliers) : json(nullptr)},
	     {"segments",
	      {{"load_size", segment_rows_json(r.segments.load_size)},
	       {"delivery_region", segment_rows_json(r.segments.delivery_region)},
	       {"collection_region", segment_rows_json(r.segments.collection_region)}}},
	     {"trend", r.trend ? json(*r.trend) : json(nullptr)},
	     {"weekly", {{"points", weekly}, {"outliers", r.weekly.outliers}}},
	     {"skipped", skipped},
	     {"rows", rows}};
}

void to_json(json &j, const Comparison &c) {
	j = {{"k", c.k},
	     {"n", c.n},
	     {"mape_trained", c.mape_trained},
	     {"mape_untrained", c.mape_untrained},
	     {"test", c.test},
	     {"reject", c.reject},
	     {"conclusion", c.conclusion}};
}

void to_json(json &j, const LinearModel &m) {
	json groups = json::array();
	for (const auto g : m.groups)
		groups.push_back(to_string(g));
	json candidates = json::array();
	for (const auto g : m.spec.candidates)
		candidates.push_back(to_string(g));
	json columns = json::array();
	for (std::size_t i = 0; i < m.columns.size(); ++i)
		columns.push_back({{"name", m.columns[i].name},
		                   {"group", to_string(m.columns[i].group)},
		                   {"coefficient", m.coefficients(static_cast<Eigen::Index>(i))},
		                   {"se", m.standard_errors(static_cast<Eigen::Index>(i))}});
	json steps = json::array();
	for (const auto &s : m.steps)
		steps.push_back(
		    {{"added", s.added}, {"aic", s.aic}, {"bic", s.bic}, {"rss", s.rss}, {"parameters", s.parameters}});

	j = {{"spec",
	      {{"candidates", candidates},
	       {"rare_threshold", m.spec.rare_threshold},
	       {"z_cap", m.spec.z_cap},
	       {"criterion", to_string(m.spec.criterion)},
	       {"grid_degrees", m.spec.grid_degrees}}},
	     {"groups", groups},
	     {"intercept", m.intercept},
	     {"intercept_se", m.intercept_se},
	     {"columns", columns},
	     {"encoder",
	      {{"collection", dictionary_json(m.encoder.collection)},
	       {"delivery", dictionary_json(m.encoder.delivery)},
	       {"numeric_low", m.encoder.low},
	       {"numeric_high", m.encoder.high}}},
	     {"aic", m.aic},
	     {"bic", m.bic},
	     {"rss", m.rss},
	     {"n", m.n},
	     {"steps", steps},
	     {"warnings", m.warnings}};
}

void to_json(json &j, const ManualErrorProfile &p) {
	j = {{"margin", p.margin},
	     {"n", p.error_eur.size()},
	     {"mean_error_pct", p.mean_error_pct},
	     {"mape", p.mape},
	     {"q3ape", p.q3ape},
	     {"sd_error_pct", p.sd_error_pct}};
}

void to_json(json &j, const IndifferenceResult &r) {
	j = {{"profit_manual", r.profit_manual},
	     {"profit_method", r.profit_method},
	     {"indifference_cost", r.indifference_cost},
	     {"se", r.se},
	     {"ci", {r.ci_low, r.ci_high}},
	     {"win_rate_manual", r.win_rate_manual},
	     {"win_rate_method", r.win_rate_method},
	     {"trials", r.trials}};
}

void to_json(json &j, const SweepGrid &g) {
	json grid = json::array();
	for (Eigen::Index r = 0; r < g.indifference_cost.rows(); ++r) {
		json row = json::array();
		for (Eigen::Index c = 0; c < g.indifference_cost.cols(); ++c)
			row.push_back(g.indifference_cost(r, c));
		grid.push_back(std::move(row));
	}
	j = {{"bidders", g.bidders}, {"margins", g.margins}, {"indifference_cost", grid}, {"cells", g.cells}};
}

void to_json(json &j, const Lane &l) {
	j = {{"collection", geo_json(l.collection)},
	     {"delivery", geo_json(l.delivery)},
	     {"base_rate", l.base_rate},
	     {"per_km_rate", l.per_km_rate},
	     {"weight", l.weight},
	     {"direction", to_string(l.direction)},
	     {"col_country", l.col_country},
	     {"del_country", l.del_country}};
}

void from_json(const json &j, Lane &l) {
	l = Lane{};
	l.collection = geo_from(j.at("collection"));
	l.delivery = geo_from(j.at("delivery"));
	l.base_rate = j.value("base_rate", l.base_rate);
	l.per_km_rate = j.value("per_km_rate", l.per_km_rate);
	l.weight = j.value("weight", l.weight);
	if (j.contains("direction"))
		l.direction = parse_enum(j["direction"], kDirections, "direction");
	l.col_country = j.value("col_country", std::string{});
	l.del_country = j.value("del_country", std::string{});
}

void to_json(json &j, const SyntheticSpec &s) {
	j = {{"n_jobs", s.n_jobs},
	     {"n_lanes", s.n_lanes},
	     {"lanes", s.lanes},
	     {"start_day", s.start_day},
	     {"date_span_days", s.date_span_days},
	     {"jitter_km", s.jitter_km},
	     {"load_mixture", s.load_mixture},
	     {"fixed_load", s.fixed_load ? json(*s.fixed_load) : json(nullptr)},
	     {"load_exponent", s.load_exponent},
	     {"cost_noise", s.cost_noise},
	     {"annual_trend", s.annual_trend},
	     {"margin", s.margin},
	     {"margin_noise", s.margin_noise},
	     {"seed", s.seed}};
}

void from_json(const json &j, SyntheticSpec &s) {
	static const std::array<std::string_view, 14> known{
	    "n_jobs",     "n_lanes",    "lanes",        "start_day", "date_span_days", "jitter_km",    "load_mixture",
	    "fixed_load", "load_exponent", "cost_noise", "annual_trend", "margin",        "margin_noise", "seed"};
	for (const auto &[key, _] : j.items())
		if (std::find(known.begin(), known.end(), key) == known.end())
			throw std::invalid_argument("unknown synthetic spec field: " + key);
	s.n_jobs = j.value("n_jobs", s.n_jobs);
	s.n_lanes = j.value("n_lanes", s.n_lanes);
	if (j.contains("lanes"))
		j["lanes"].get_to(s.lanes);
	s.start_day = j.value("start_day", s.start_day);
	s.date_span_days = j.value("date_span_days", s.date_span_days);
	s.jitter_km = j.value("jitter_km", s.jitter_km);
	if (j.contains("load_mixture"))
		j["load_mixture"].get_to(s.load_mixture);
	if (j.contains("fixed_load") && !j["fixed_load"].is_null())
		s.fixed_load = j["fixed_load"].get<double>();
	s.load_exponent = j.value("load_exponent", s.load_exponent);
	s.cost_noise = j.value("cost_noise", s.cost_noise);
	s.annual_trend = j.value("annual_trend", s.annual_trend);
	s.margin = j.value("margin", s.margin);
	s.margin_noise = j.value("margin_noise", s.margin_noise);
	s.seed = j.value("seed", s.seed);
}

std::string trial_rows_csv(const TrialReport &r, std::chrono::year_month_day datum) {
	std::string out = "id,date,load_size,estimate,actual,error_eur,error_pct,ape,pool_size,underfilled,exact_match,"
	                  "outlier,neighbors\n";
	for (const auto &row : r.rows) {
		out += std::to_string(row.id) + ',' + format_iso_date(row.date, datum) + ',' + fmt(row.load_size) + ',' +
		       fmt(row.estimate) + ',' + fmt(row.actual) + ',' + fmt(row.error_eur) + ',' + fmt(row.error_pct) + ',' +
		       fmt(row.ape) + ',' + std::to_string(row.pool_size) + ',' + (row.underfilled ? "1" : "0") + ',' +
		       (row.exact_match ? "1" : "0") + ',' + (row.outlier ? "1" : "0") + ',';
		for (std::size_t i = 0; i < row.neighbors.size(); ++i) {
			if (i)
				out += ';';
			out += std::to_string(row.neighbors[i]);
		}
		out += '\n';
	}
	return out;
}

std::string weekly_series_csv(const WeeklySeries &w) {
	std::string out = "week,n,mape\n";
	for (const auto &p : w.points)
		out += std::to_string(p.week) + ',' + std::to_string(p.n) + ',' + fmt(p.mape) + '\n';
	return out;
}

std::string sweep_grid_csv(const SweepGrid &g) {
	std::string out = "bidders";
	for (const double m : g.margins)
		out += ',' + fmt(m);
	out += '\n';
	for (std::size_t r = 0; r < g.bidders.size(); ++r) {
		out += std::to_string(g.bidders[r]);
		for (std::size_t c = 0; c < g.margins.size(); ++c)
			out += ',' + fmt(g.indifference_cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
		out += '\n';
	}
	return out;
}

std::string dump(const json &j) {
	return j.dump(2) + '\n';
}

std::string sha256_hex(std::string_view bytes) {
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
	std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
	unsigned int len = 0;
	if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
	    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
	    EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
		throw std::runtime_error("sha256 failed");
	static constexpr char kHex[] = "0123456789abcdef";
	std::string out;
	out.reserve(2 * len);
	for (unsigned int i = 0; i < len; ++i) {
		out += kHex[md[i] >> 4];
		out += kHex[md[i] & 0xf];
	}
	return out;
}

} // namespace eba
