#include "eba/pipeline.hpp"
#include "eba/rng.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using eba::json;
namespace fs = std::filesystem;

struct Globals {
	std::optional<std::uint64_t> seed;
	std::string config_path;
	std::string out = "out";
	bool paper_fidelity = false;
	unsigned workers = 1;
	bool record_time = false;
};

eba::PipelineConfig load_config(const Globals &g) {
	eba::PipelineConfig cfg;
	if (!g.config_path.empty())
		eba::from_json(json::parse(eba::read_file(g.config_path)), cfg);
	if (g.seed)
		cfg.master_seed = *g.seed;
	cfg.apply_master_seed();
	if (g.paper_fidelity)
		cfg.use_paper_fidelity();
	cfg.workers = g.workers;
	cfg.validate();
	return cfg;
}

eba::OutputTree open_tree(const Globals &g, const std::string &command, const eba::PipelineConfig &cfg) {
	eba::OutputTree out(g.out, command, json(cfg), cfg.master_seed);
	if (!g.config_path.empty())
		out.add_input(g.config_path);
	if (g.record_time)
		out.stamp_time();
	return out;
}

eba::Dataset input_dataset(eba::OutputTree &out, const std::string &path) {
	out.add_input(path);
	return eba::load_dataset(path);
}

eba::Segmentation input_segmentation(eba::OutputTree &out, const std::string &path) {
	out.add_input(path);
	return json::parse(eba::read_file(path)).get<eba::Segmentation>();
}

eba::TrialReport input_trial(eba::OutputTree &out, const std::string &path) {
	out.add_input(path);
	return eba::trial_rows_from_json(json::parse(eba::read_file(path)));
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Freight cost estimation by analogy: data, training, backtests and economics"};
	app.require_subcommand(1);
	Globals g;
	app.add_option("--seed", g.seed, "Master seed (overrides the config file)");
	app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
	app.add_option("--out", g.out, "Output directory")->capture_default_str();
	app.add_flag("--paper-fidelity", g.paper_fidelity, "22500 random-search iterations and a 2500-iteration simplex cap");
	app.add_option("--workers", g.workers, "Worker threads; results do not depend on it")
	    ->check(CLI::Range(1u, 1024u))
	    ->capture_default_str();
	app.add_flag("--record-time", g.record_time, "Record a UTC start time in manifests");

	std::string input, segmentation_path, model_path_arg, trial_path, trained_path, untrained_path, baseline_path,
	    spec_path, simulation_path;
	std::optional<std::size_t> n_jobs;

	auto *synth = app.add_subcommand("synth", "Generate a synthetic job log");
	synth->add_option("--spec", spec_path, "Synthetic spec JSON (defaults to the config's synth section)")
	    ->check(CLI::ExistingFile);
	synth->add_option("--jobs", n_jobs, "Number of jobs");

	auto *ingest = app.add_subcommand("ingest", "Validate a job CSV and report rejected rows");
	ingest->add_option("--input", input, "Job CSV")->required()->check(CLI::ExistingFile);

	auto *seg_cmd = app.add_subcommand("segment", "Split jobs into test, historical and training sets");
	seg_cmd->add_option("--input", input, "Job CSV")->required()->check(CLI::ExistingFile);

	auto *train = app.add_subcommand("train", "Fit attribute weights for each k");
	train->add_option("--input", input, "Job CSV")->required()->check(CLI::ExistingFile);
	train->add_option("--segmentation", segmentation_path, "Segmentation JSON")->required()->check(CLI::ExistingFile);

	auto *backtest = app.add_subcommand("backtest", "Walk-forward trials with trained and unit weights");
	backtest->add_option("--input", input, "Job CSV")->required()->check(CLI::ExistingFile);
	backtest->add_option("--segmentation", segmentation_path, "Segmentation JSON")->required()->check(CLI::ExistingFile);
	backtest->add_option("--model", model_path_arg, "Trained model JSON")->required()->check(CLI::ExistingFile);

	auto *baseline = app.add_subcommand("baseline", "Stepwise regression and combined forecast");
	baseline->add_option("--input", input, "Job CSV")->required()->check(CLI::ExistingFile);
	baseline->add_option("--segmentation", segmentation_path, "Segmentation JSON")->required()->check(CLI::ExistingFile);
	baseline->add_option("--trial", trial_path, "Trial report JSON with analogy estimates")
	    ->required()
	    ->check(CLI::ExistingFile);

	auto *compare = app.add_subcommand("compare", "Trained vs untrained test and method comparison");
	compare->add_option("--trained", trained_path, "Trial 1 report JSON")->required()->check(CLI::ExistingFile);
	compare->add_option("--untrained", untrained_path, "Trial 2 report JSON")->required()->check(CLI::ExistingFile);
	compare->add_option("--baseline", baseline_path, "Baseline report JSON")->check(CLI::ExistingFile);

	auto *simulate = app.add_subcommand("simulate", "Indifference labor cost and sensitivity sweep");
	simulate->add_option("--input", input, "Job CSV with revenues")->required()->check(CLI::ExistingFile);
	simulate->add_option("--trial", trial_path, "Trial report JSON")->required()->check(CLI::ExistingFile);

	auto *report = app.add_subcommand("report", "CSV exports of trial or simulation reports");
	report->add_option("--trial", trial_path, "Trial report JSON")->check(CLI::ExistingFile);
	report->add_option("--simulation", simulation_path, "Simulation report JSON")->check(CLI::ExistingFile);
	report->require_option(1, 2);

	auto *pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
	pipeline->add_option("--input", input, "Job CSV (synthetic data when omitted)")->check(CLI::ExistingFile);

	for (auto *sub : app.get_subcommands([](const CLI::App *) { return true; }))
		sub->fallthrough();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	try {
		auto cfg = load_config(g);
		if (pipeline->parsed()) {
			eba::run_pipeline(cfg, g.out, input.empty() ? std::nullopt : std::optional<fs::path>(input), g.record_time);
			std::cout << "pipeline outputs written to " << g.out << '\n';
			return 0;
		}

		if (synth->parsed()) {
			if (!spec_path.empty()) {
				const auto j = json::parse(eba::read_file(spec_path));
				auto spec = cfg.synth;
				eba::from_json(j, spec);
				if (!j.contains("seed"))
					spec.seed = cfg.synth.seed;
				cfg.synth = spec;
			}
			if (n_jobs)
				cfg.synth.n_jobs = *n_jobs;
			auto out = open_tree(g, "synth", cfg);
			if (!spec_path.empty())
				out.add_input(spec_path);
			const auto dataset = eba::generate(cfg.synth);
			out.write("data/jobs.csv", eba::serialize_jobs_csv(dataset));
			out.finish();
			std::cout << dataset.size() << " jobs written to " << (out.root() / "data/jobs.csv").string() << '\n';
			return 0;
		}

		if (ingest->parsed()) {
			auto out = open_tree(g, "ingest", cfg);
			out.add_input(input);
			const auto parsed = eba::read_jobs_csv(input);
			std::string lines;
			for (const auto &r : parsed.rejections)
				lines += eba::rejection_json_line(r) + '\n';
			out.write("data/jobs.csv", eba::serialize_jobs_csv(parsed.dataset));
			out.write("reports/rejections.jsonl", lines);
			out.finish();
			std::cout << parsed.dataset.size() << " jobs accepted, " << parsed.rejections.size() << " rejected\n";
			return 0;
		}

		if (seg_cmd->parsed()) {
			auto out = open_tree(g, "segment", cfg);
			const auto dataset = input_dataset(out, input);
			const auto seg =
			    eba::segment(dataset, eba::derive_seed(cfg.master_seed, eba::Stream::segmentation), cfg.historical_share);
			out.write_json("reports/segmentation.json", seg);
			out.finish();
			std::cout << "test " << seg.test.size() << ", historical " << seg.historical.size() << ", training "
			          << seg.training.size() << '\n';
			return 0;
		}

		if (train->parsed()) {
			auto out = open_tree(g, "train", cfg);
			const auto dataset = input_dataset(out, input);
			const auto seg = input_segmentation(out, segmentation_path);
			for (const auto &[k, m] : eba::run_training(dataset, seg, cfg)) {
				out.write_json(eba::model_path(k), m);
				std::cout << "k=" << k << " training MAPE " << m.training_mape << '\n';
			}
			out.finish();
			return 0;
		}

		if (backtest->parsed()) {
			auto out = open_tree(g, "backtest", cfg);
			const auto dataset = input_dataset(out, input);
			const auto seg = input_segmentation(out, segmentation_path);
			out.add_input(model_path_arg);
			const auto model = json::parse(eba::read_file(model_path_arg)).get<eba::TrainedModel>();
			const auto [trial1, trial2] = eba::run_trials(dataset, seg, model, cfg);
			eba::write_trial(out, "trial1", trial1, dataset);
			eba::write_trial(out, "trial2", trial2, dataset);
			out.finish();
			std::cout << "trial1 MAPE " << trial1.overall.mape << ", trial2 MAPE " << trial2.overall.mape << '\n';
			return 0;
		}

		if (baseline->parsed()) {
			auto out = open_tree(g, "baseline", cfg);
			const auto dataset = input_dataset(out, input);
			const auto seg = input_segmentation(out, segmentation_path);
			const auto trial = input_trial(out, trial_path);
			const auto b = eba::run_baseline(dataset, seg, trial, cfg.regression);
			out.write_json("reports/baseline.json", b);
			out.finish();
			std::cout << "regression MAPE " << b.regression.mape << ", combined MAPE " << b.combined.mape << '\n';
			return 0;
		}

		if (compare->parsed()) {
			auto out = open_tree(g, "compare", cfg);
			const auto trained = input_trial(out, trained_path);
			const auto untrained = input_trial(out, untrained_path);
			const auto c = eba::compare_reports(trained, untrained);
			json result{{"trained_vs_untrained", c}};
			if (!baseline_path.empty()) {
				out.add_input(baseline_path);
				const auto bj = json::parse(eba::read_file(baseline_path));
				eba::BaselineReport b;
				for (const auto &r : bj.at("rows"))
					b.rows.push_back({r.at("id").get<eba::JobId>(), r.at("actual").get<double>(),
					                  r.at("analogy").get<double>(), r.at("regression").get<double>(),
					                  r.at("combined").get<double>()});
				std::vector<double> actual, analogy, regression, combined;
				for (const auto &r : b.rows) {
					actual.push_back(r.actual);
					analogy.push_back(r.analogy);
					regression.push_back(r.regression);
					combined.push_back(r.combined);
				}
				b.analogy = eba::stats::error_stats(actual, analogy);
				b.regression = eba::stats::error_stats(actual, regression);
				b.combined = eba::stats::error_stats(actual, combined);
				result["methods"] = eba::method_comparison(b);
			}
			out.write_json("reports/comparison.json", result);
			out.finish();
			std::cout << c.conclusion << " (p = " << c.test.p << ")\n";
			return 0;
		}

		if (simulate->parsed()) {
			auto out = open_tree(g, "simulate", cfg);
			const auto dataset = input_dataset(out, input);
			const auto trial = input_trial(out, trial_path);
			const auto sim = eba::run_simulation(dataset, trial, cfg);
			out.write_json("reports/simulation.json", sim);
			out.write("reports/sweep.csv", eba::sweep_grid_csv(sim.sweep));
			out.finish();
			std::cout << "indifference cost " << sim.indifference.indifference_cost << " EUR per estimate\n";
			return 0;
		}

		if (report->parsed()) {
			auto out = open_tree(g, "report", cfg);
			if (!trial_path.empty()) {
				const auto trial = input_trial(out, trial_path);
				const auto stem = fs::path(trial_path).stem().string();
				out.write("reports/" + stem + "_rows.csv", eba::trial_rows_csv(trial, eba::Dataset::kDefaultDatum));
				out.write("reports/" + stem + "_weekly.csv", eba::weekly_series_csv(trial.weekly));
			}
			if (!simulation_path.empty()) {
				out.add_input(simulation_path);
				const auto j = json::parse(eba::read_file(simulation_path));
				out.write("reports/sweep.csv", eba::sweep_grid_csv(eba::sweep_from_json(j.at("sweep"))));
			}
			out.finish();
			return 0;
		}
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 2;
}
