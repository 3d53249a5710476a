#include "eba/pipeline.hpp"

#include "eba/rng.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eba {

namespace {

void require_known_keys(const json &j, std::initializer_list<std::string_view> known, const char *where) {
	if (!j.is_object())
		throw std::invalid_argument(std::string(where) + " must be a JSON object");
	for (const auto &[key, _] : j.items())
		if (std::find(known.begin(), known.end(), key) == known.end())
			throw std::invalid_argument(std::string("unknown ") + where + " field: " + key);
}

PredictorGroup parse_group(const std::string &s) {
	for (const auto g : kAllPredictorGroups)
		if (to_string(g) == s)
			return g;
	throw std::invalid_argument("unknown predictor group: " + s);
}

std::vector<double> column(const std::vector<BaselineRow> &rows, double BaselineRow::*field) {
	std::vector<double> out;
	out.reserve(rows.size());
	for (const auto &r : rows)
		out.push_back(r.*field);
	return out;
}

} // namespace

void PipelineConfig::validate() const {
	synth.validate();
	training.validate();
	if (!(historical_share >= 0.0 && historical_share <= 1.0))
		throw std::invalid_argument("historical_share must lie in [0, 1]");
	if (std::find(training.k_range.begin(), training.k_range.end(), trial_k) == training.k_range.end())
		throw std::invalid_argument("trial k must be one of the trained k values");
	if (lag_days < 0)
		throw std::invalid_argument("lag_days must be non-negative");
	regression.validate();
	if (auction_bidders < 2 || auction_trials < 1 || sweep_trials < 1)
		throw std::invalid_argument("auctions need at least two bidders and one trial");
	if (target_margin && !(*target_margin > -1.0))
		throw std::invalid_argument("target margin must exceed -100%");
	if (sweep_bidders.empty() || sweep_margins.empty())
		throw std::invalid_argument("sweep axes must be nonempty");
}

void PipelineConfig::apply_master_seed() {
	synth.seed = derive_seed(master_seed, Stream::synthesis);
	training.seed = derive_seed(master_seed, Stream::training);
}

void PipelineConfig::use_paper_fidelity() {
	training.random_iterations = TrainingConfig::kPaperRandomIterations;
	training.simplex.max_iterations = TrainingConfig::kPaperSimplexIterations;
}

void to_json(json &j, const PipelineConfig &c) {
	json candidates = json::array();
	for (const auto g : c.regression.candidates)
		candidates.push_back(to_string(g));
	j = {{"master_seed", c.master_seed},
	     {"synth", c.synth},
	     {"historical_share", c.historical_share},
	     {"training",
	      {{"random_iterations", c.training.random_iterations},
	       {"k_range", c.training.k_range},
	       {"mode", to_string(c.training.mode)},
	       {"seed", c.training.seed},
	       {"simplex", c.training.simplex}}},
	     {"trial",
	      {{"k", c.trial_k}, {"lag_days", c.lag_days}, {"include_estimated_test_jobs", c.include_estimated_test_jobs}}},
	     {"regression",
	      {{"candidates", candidates},
	       {"rare_threshold", c.regression.rare_threshold},
	       {"z_cap", c.regression.z_cap},
	       {"criterion", c.regression.criterion == InformationCriterion::aic ? "aic" : "bic"},
	       {"grid_degrees", c.regression.grid_degrees}}},
	     {"auction",
	      {{"bidders", c.auction_bidders},
	       {"target_margin", c.target_margin ? json(*c.target_margin) : json(nullptr)},
	       {"trials", c.auction_trials},
	       {"common_random_numbers", c.common_random_numbers},
	       {"sweep_bidders", c.sweep_bidders},
	       {"sweep_margins", c.sweep_margins},
	       {"sweep_trials", c.sweep_trials}}}};
}

void from_json(const json &j, PipelineConfig &c) {
	require_known_keys(j, {"master_seed", "synth", "historical_share", "training", "trial", "regression", "auction"},
	                   "config");
	c.master_seed = j.value("master_seed", c.master_seed);
	if (j.contains("synth"))
		from_json(j["synth"], c.synth);
	c.historical_share = j.value("historical_share", c.historical_share);
	if (j.contains("training")) {
		const auto &t = j["training"];
		require_known_keys(t, {"random_iterations", "k_range", "mode", "seed", "simplex"}, "training");
		c.training.random_iterations = t.value("random_iterations", c.training.random_iterations);
		c.training.seed = t.value("seed", c.training.seed);
		if (t.contains("k_range"))
			t["k_range"].get_to(c.training.k_range);
		if (t.contains("mode")) {
			const auto m = parse_weighting(t["mode"].get<std::string>());
			if (!m)
				throw std::invalid_argument("unknown weighting mode");
			c.training.mode = *m;
		}
		if (t.contains("simplex"))
			from_json(t["simplex"], c.training.simplex);
	}
	if (j.contains("trial")) {
		const auto &t = j["trial"];
		require_known_keys(t, {"k", "lag_days", "include_estimated_test_jobs"}, "trial");
		c.trial_k = t.value("k", c.trial_k);
		c.lag_days = t.value("lag_days", c.lag_days);
		c.include_estimated_test_jobs = t.value("include_estimated_test_jobs", c.include_estimated_test_jobs);
	}
	if (j.contains("regression")) {
		const auto &r = j["regression"];
		require_known_keys(r, {"candidates", "rare_threshold", "z_cap", "criterion", "grid_degrees"}, "regression");
		if (r.contains("candidates")) {
			c.regression.candidates.clear();
			for (const auto &g : r["candidates"])
				c.regression.candidates.push_back(parse_group(g.get<std::string>()));
		}
		c.regression.rare_threshold = r.value("rare_threshold", c.regression.rare_threshold);
		c.regression.z_cap = r.value("z_cap", c.regression.z_cap);
		if (r.contains("criterion")) {
			const auto s = r["criterion"].get<std::string>();
			if (s != "aic" && s != "bic")
				throw std::invalid_argument("criterion must be aic or bic");
			c.regression.criterion = s == "aic" ? InformationCriterion::aic : InformationCriterion::bic;
		}
		c.regression.grid_degrees = r.value("grid_degrees", c.regression.grid_degrees);
	}
	if (j.contains("auction")) {
		const auto &a = j["auction"];
		require_known_keys(a,
		                   {"bidders", "target_margin", "trials", "common_random_numbers", "sweep_bidders",
		                    "sweep_margins", "sweep_trials"},
		                   "auction");
		c.auction_bidders = a.value("bidders", c.auction_bidders);
		if (a.contains("target_margin"))
			c.target_margin = a["target_margin"].is_null() ? std::nullopt
			                                                : std::optional<double>(a["target_margin"].get<double>());
		c.auction_trials = a.value("trials", c.auction_trials);
		c.common_random_numbers = a.value("common_random_numbers", c.common_random_numbers);
		if (a.contains("sweep_bidders"))
			a["sweep_bidders"].get_to(c.sweep_bidders);
		if (a.contains("sweep_margins"))
			a["sweep_margins"].get_to(c.sweep_margins);
		c.sweep_trials = a.value("sweep_trials", c.sweep_trials);
	}
}

void to_json(json &j, const RunManifest &m) {
	j = {{"command", m.command},
	     {"config", m.config},
	     {"config_digest", m.config_digest},
	     {"master_seed", m.master_seed},
	     {"inputs", m.inputs},
	     {"outputs", m.outputs},
	     {"tool_version", m.tool_version}};
	if (m.started_utc)
		j["started_utc"] = *m.started_utc;
}

OutputTree::OutputTree(std::filesystem::path root, std::string command, const json &config,
                       std::uint64_t master_seed)
    : root_(std::move(root)) {
	manifest_.command = std::move(command);
	manifest_.config = config;
	manifest_.config_digest = sha256_hex(config.dump());
	manifest_.master_seed = master_seed;
}

void OutputTree::add_input(const std::filesystem::path &path) {
	manifest_.inputs[path.generic_string()] = sha256_hex(read_file(path));
}

void OutputTree::write(const std::string &relative, std::string_view content) {
	const auto path = root_ / relative;
	std::filesystem::create_directories(path.parent_path());
	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	if (!f)
		throw std::runtime_error("cannot write " + path.string());
	f.write(content.data(), static_cast<std::streamsize>(content.size()));
	if (!f)
		throw std::runtime_error("write failed: " + path.string());
	manifest_.outputs[relative] = sha256_hex(content);
}

void OutputTree::stamp_time() {
	const std::time_t now = std::time(nullptr);
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	manifest_.started_utc = buf;
}

void OutputTree::finish() {
	const auto path = root_ / "manifests" / (manifest_.command + ".json");
	std::filesystem::create_directories(path.parent_path());
	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	f << dump(json(manifest_));
	if (!f)
		throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path &path) {
	std::ifstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot read " + path.string());
	std::ostringstream ss;
	ss << f.rdbuf();
	return ss.str();
}

std::string model_path(int k) {
	return "models/model_k" + std::to_string(k) + ".json";
}

void to_json(json &j, const BaselineReport &b) {
	json rows = json::array();
	for (const auto &r : b.rows)
		rows.push_back({{"id", r.id},
		                {"actual", r.actual},
		                {"analogy", r.analogy},
		                {"regression", r.regression},
		                {"combined", r.combined}});
	j = {{"model", b.model},
	     {"analogy", b.analogy},
	     {"regression", b.regression},
	     {"combined", b.combined},
	     {"rows", rows}};
}

BaselineReport run_baseline(const Dataset &dataset, const Segmentation &seg, const TrialReport &trial,
                            const FeatureSpec &spec) {
	std::vector<JobId> pool_ids = seg.historical;
	pool_ids.insert(pool_ids.end(), seg.training.begin(), seg.training.end());
	std::sort(pool_ids.begin(), pool_ids.end());
	const auto pool = dataset.select(pool_ids);

	BaselineReport b;
	b.model = fit_stepwise(pool, spec);
	for (const auto &row : trial.rows) {
		BaselineRow r;
		r.id = row.id;
		r.actual = row.actual;
		r.analogy = row.estimate;
		r.regression = predict(b.model, dataset.at(row.id));
		r.combined = combine_min(r.analogy, r.regression);
		b.rows.push_back(r);
	}
	if (b.rows.empty())
		throw std::invalid_argument("trial has no estimated jobs");
	const auto actual = column(b.rows, &BaselineRow::actual);
	b.analogy = stats::error_stats(actual, column(b.rows, &BaselineRow::analogy));
	b.regression = stats::error_stats(actual, column(b.rows, &BaselineRow::regression));
	b.combined = stats::error_stats(actual, column(b.rows, &BaselineRow::combined));
	return b;
}

json method_comparison(const BaselineReport &baseline) {
	const auto actual = column(baseline.rows, &BaselineRow::actual);
	const auto ape_analogy = stats::ape(actual, column(baseline.rows, &BaselineRow::analogy));
	json methods = json::array();
	json tests = json::array();
	const std::pair<const char *, const stats::ErrorStats *> entries[] = {
	    {"analogy", &baseline.analogy}, {"regression", &baseline.regression}, {"combined", &baseline.combined}};
	for (const auto &[name, s] : entries)
		methods.push_back({{"method", name}, {"n", s->n}, {"mape", s->mape}, {"q3ape", s->q3ape}});
	for (const auto &[name, field] :
	     {std::pair{"regression", &BaselineRow::regression}, std::pair{"combined", &BaselineRow::combined}}) {
		const auto other = stats::ape(actual, column(baseline.rows, field));
		// Positive mean difference: analogy has the lower error.
		tests.push_back({{"baseline", name}, {"test", stats::paired_t_test(other, ape_analogy, stats::Sided::two)}});
	}
	return {{"methods", methods}, {"paired_tests_vs_analogy", tests}};
}

void to_json(json &j, const SimulationReport &s) {
	j = {{"manual_profile", s.manual},
	     {"target_margin", s.target_margin},
	     {"indifference", s.indifference},
	     {"reference_hourly_rate_eur", kReferenceHourlyRateEur},
	     {"hours_at_reference_rate", s.hours_at_reference_rate},
	     {"sweep", s.sweep}};
}

SimulationReport run_simulation(const Dataset &dataset, const TrialReport &trial, const PipelineConfig &cfg) {
	SimulationReport s;
	s.manual = derive_manual_margin(dataset.jobs());
	s.target_margin = cfg.target_margin.value_or(s.manual.margin);

	AuctionConfig a;
	a.n_bidders = cfg.auction_bidders;
	a.target_margin = s.target_margin;
	a.trials = cfg.auction_trials;
	a.seed = derive_seed(cfg.master_seed, Stream::simulation);
	a.common_random_numbers = cfg.common_random_numbers;
	a.workers = cfg.workers;
	for (const auto &j : dataset.jobs())
		a.costs.push_back(j.cost_eur);
	for (const double e : s.manual.error_pct)
		a.manual_errors.push_back(e / 100.0);
	for (const auto &row : trial.rows)
		a.method_errors.push_back(row.error_pct / 100.0);

	s.indifference = simulate_indifference(a);
	s.hours_at_reference_rate = labor_hours_equivalent(s.indifference.indifference_cost, kReferenceHourlyRateEur);

	auto sweep_base = a;
	sweep_base.trials = cfg.sweep_trials;
	sweep_base.seed = substream_seed(a.seed, 1);
	s.sweep = sensitivity_sweep(sweep_base, cfg.sweep_bidders, cfg.sweep_margins);
	return s;
}

TrialReport trial_rows_from_json(const json &j) {
	TrialReport r;
	const auto &c = j.at("config");
	r.config.label = c.value("label", std::string("trial"));
	r.config.k = c.at("k").get<int>();
	c.at("weights").get_to(r.config.weights);
	r.config.lag_days = c.value("lag_days", r.config.lag_days);
	for (const auto &row : j.at("rows")) {
		TrialRow t;
		t.id = row.at("id").get<JobId>();
		t.date = row.at("date").get<Day>();
		t.load_size = row.at("load_size").get<double>();
		t.estimate = row.at("estimate").get<double>();
		t.actual = row.at("actual").get<double>();
		t.error_eur = row.at("error_eur").get<double>();
		t.error_pct = row.at("error_pct").get<double>();
		t.ape = row.at("ape").get<double>();
		t.pool_size = row.value("pool_size", std::size_t{0});
		t.underfilled = row.value("underfilled", false);
		t.exact_match = row.value("exact_match", false);
		t.outlier = row.value("outlier", false);
		if (row.contains("neighbors"))
			row["neighbors"].get_to(t.neighbors);
		r.rows.push_back(std::move(t));
	}
	if (j.contains("weekly")) {
		for (const auto &p : j["weekly"].at("points"))
			r.weekly.points.push_back(
			    {p.at("week").get<std::int64_t>(), p.at("n").get<std::size_t>(), p.at("mape").get<double>()});
		j["weekly"].at("outliers").get_to(r.weekly.outliers);
	}
	std::vector<double> actual, estimate;
	for (const auto &t : r.rows) {
		actual.push_back(t.actual);
		estimate.push_back(t.estimate);
	}
	if (!r.rows.empty())
		r.overall = stats::error_stats(actual, estimate);
	return r;
}

SweepGrid sweep_from_json(const json &j) {
	SweepGrid g;
	j.at("bidders").get_to(g.bidders);
	j.at("margins").get_to(g.margins);
	const auto &grid = j.at("indifference_cost");
	g.indifference_cost.resize(static_cast<Eigen::Index>(g.bidders.size()), static_cast<Eigen::Index>(g.margins.size()));
	if (grid.size() != g.bidders.size())
		throw std::invalid_argument("sweep grid rows do not match the bidder axis");
	for (std::size_t r = 0; r < g.bidders.size(); ++r) {
		if (grid[r].size() != g.margins.size())
			throw std::invalid_argument("sweep grid columns do not match the margin axis");
		for (std::size_t c = 0; c < g.margins.size(); ++c)
			g.indifference_cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = grid[r][c].get<double>();
	}
	return g;
}

Dataset load_dataset(const std::filesystem::path &csv) {
	return read_jobs_csv(csv.string()).dataset;
}

std::map<int, TrainedModel> run_training(const Dataset &dataset, const Segmentation &seg, const PipelineConfig &cfg) {
	auto training = cfg.training;
	training.workers = cfg.workers;
	return train_all(dataset.select(seg.historical), dataset.select(seg.training), training);
}

std::pair<TrialReport, TrialReport> run_trials(const Dataset &dataset, const Segmentation &seg,
                                               const TrainedModel &model, const PipelineConfig &cfg) {
	TrialConfig t1;
	t1.label = "trial1";
	t1.k = model.k;
	t1.weights = model.weights;
	t1.mode = model.mode;
	t1.lag_days = cfg.lag_days;
	t1.include_estimated_test_jobs = cfg.include_estimated_test_jobs;
	t1.seed = cfg.master_seed;
	t1.workers = cfg.workers;
	TrialConfig t2 = t1;
	t2.label = "trial2";
	t2.weights = AttributeWeights{};
	return {run_trial(seg, dataset, t1), run_trial(seg, dataset, t2)};
}

void write_trial(OutputTree &out, const std::string &name, const TrialReport &r, const Dataset &dataset) {
	out.write_json("reports/" + name + ".json", r);
	out.write("reports/" + name + "_rows.csv", trial_rows_csv(r, dataset.datum()));
	out.write("reports/" + name + "_weekly.csv", weekly_series_csv(r.weekly));
}

void run_pipeline(const PipelineConfig &cfg_in, const std::filesystem::path &root,
                  const std::optional<std::filesystem::path> &input_csv, bool record_time) {
	PipelineConfig cfg = cfg_in;
	cfg.apply_master_seed();
	cfg.validate();

	OutputTree out(root, "pipeline", json(cfg), cfg.master_seed);
	if (record_time)
		out.stamp_time();
	Dataset dataset;
	if (input_csv) {
		out.add_input(*input_csv);
		auto parsed = read_jobs_csv(input_csv->string());
		std::string rejections;
		for (const auto &r : parsed.rejections)
			rejections += rejection_json_line(r) + '\n';
		out.write("reports/rejections.jsonl", rejections);
		dataset = std::move(parsed.dataset);
	} else {
		dataset = generate(cfg.synth);
	}
	out.write("data/jobs.csv", serialize_jobs_csv(dataset));

	const auto seg = segment(dataset, derive_seed(cfg.master_seed, Stream::segmentation), cfg.historical_share);
	out.write_json("reports/segmentation.json", seg);

	const auto models = run_training(dataset, seg, cfg);
	for (const auto &[k, m] : models)
		out.write_json(model_path(k), m);

	const auto [trial1, trial2] = run_trials(dataset, seg, models.at(cfg.trial_k), cfg);
	write_trial(out, "trial1", trial1, dataset);
	write_trial(out, "trial2", trial2, dataset);

	const auto baseline = run_baseline(dataset, seg, trial1, cfg.regression);
	out.write_json("reports/baseline.json", baseline);

	out.write_json("reports/comparison.json", {{"trained_vs_untrained", compare_reports(trial1, trial2)},
	                                           {"methods", method_comparison(baseline)}});

	const auto sim = run_simulation(dataset, trial1, cfg);
	out.write_json("reports/simulation.json", sim);
	out.write("reports/sweep.csv", sweep_grid_csv(sim.sweep));
	out.finish();
}

} // namespace eba
