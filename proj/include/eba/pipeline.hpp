#pragma once

#include "eba/backtest.hpp"
#include "eba/economics.hpp"
#include "eba/regression.hpp"
#include "eba/serialize.hpp"
#include "eba/synth.hpp"
#include "eba/training.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eba {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Everything a run depends on. `workers` is an execution setting and is left out of the
/// serialized form so the config digest does not change with it.
struct PipelineConfig {
	std::uint64_t master_seed = 0;
	SyntheticSpec synth = [] {
		SyntheticSpec s;
		s.n_jobs = 5000;
		return s;
	}();
	double historical_share = 0.6;
	TrainingConfig training;
	int trial_k = 5;
	int lag_days = 30;
	bool include_estimated_test_jobs = false;
	FeatureSpec regression;
	int auction_bidders = 3;
	std::optional<double> target_margin; ///< empty: the margin implied by the data's revenues
	int auction_trials = 25000;
	bool common_random_numbers = true;
	std::vector<int> sweep_bidders{2, 3, 4, 5, 6};
	std::vector<double> sweep_margins{0.05, 0.10, 0.151, 0.20, 0.25};
	int sweep_trials = 5000;
	unsigned workers = 1;

	void validate() const;
	/// Derived per-stage seeds; the synthetic spec seed is replaced too.
	void apply_master_seed();
	void use_paper_fidelity();
};

void to_json(json &j, const PipelineConfig &c);
/// Unknown top-level keys are rejected.
void from_json(const json &j, PipelineConfig &c);

struct RunManifest {
	std::string command;
	json config; ///< effective configuration
	std::string config_digest;
	std::uint64_t master_seed = 0;
	std::map<std::string, std::string> inputs;  ///< path -> sha256
	std::map<std::string, std::string> outputs; ///< path relative to the output root -> sha256
	std::string tool_version{kToolVersion};
	std::optional<std::string> started_utc; ///< only recorded on request; breaks byte identity
};

void to_json(json &j, const RunManifest &m);

/// Writes artifacts under an output root and records their digests for the manifest.
class OutputTree {
public:
	OutputTree(std::filesystem::path root, std::string command, const json &config, std::uint64_t master_seed);

	void add_input(const std::filesystem::path &path);
	/// `relative` is e.g. "models/model_k5.json"; parent directories are created.
	void write(const std::string &relative, std::string_view content);
	void write_json(const std::string &relative, const json &j) { write(relative, dump(j)); }
	void stamp_time();
	/// Writes manifests/<command>.json.
	void finish();

	const std::filesystem::path &root() const noexcept { return root_; }
	const RunManifest &manifest() const noexcept { return manifest_; }

private:
	std::filesystem::path root_;
	RunManifest manifest_;
};

std::string read_file(const std::filesystem::path &path);

std::string model_path(int k);

struct BaselineRow {
	JobId id = 0;
	double actual = 0.0;
	double analogy = 0.0;
	double regression = 0.0;
	double combined = 0.0;
};

struct BaselineReport {
	LinearModel model;
	std::vector<BaselineRow> rows;
	stats::ErrorStats analogy;
	stats::ErrorStats regression;
	stats::ErrorStats combined;
};

void to_json(json &j, const BaselineReport &b);

/// Stepwise model fit on the knowledge pool (historical plus training jobs) and evaluated on the
/// rows of `trial`, alone and combined with the trial's analogy estimates by taking the minimum.
BaselineReport run_baseline(const Dataset &dataset, const Segmentation &seg, const TrialReport &trial,
                            const FeatureSpec &spec);

/// Method-level comparison: one entry per method plus paired tests of each baseline against analogy.
json method_comparison(const BaselineReport &baseline);

struct SimulationReport {
	ManualErrorProfile manual;
	double target_margin = 0.0;
	IndifferenceResult indifference;
	double hours_at_reference_rate = 0.0;
	SweepGrid sweep;
};

void to_json(json &j, const SimulationReport &s);

/// Costs are resampled from the dataset, manual errors come from its revenues, method errors
/// from the trial rows. Competitors estimate like the manual arm.
SimulationReport run_simulation(const Dataset &dataset, const TrialReport &trial, const PipelineConfig &cfg);

/// Rows and weekly points read back from a serialized TrialReport; enough for comparison,
/// simulation and CSV export.
TrialReport trial_rows_from_json(const json &j);
SweepGrid sweep_from_json(const json &j);

Dataset load_dataset(const std::filesystem::path &csv);

std::map<int, TrainedModel> run_training(const Dataset &dataset, const Segmentation &seg, const PipelineConfig &cfg);

/// Trial 1 uses the model's weights, Trial 2 unit weights; both at the model's k.
std::pair<TrialReport, TrialReport> run_trials(const Dataset &dataset, const Segmentation &seg,
                                               const TrainedModel &model, const PipelineConfig &cfg);

void write_trial(OutputTree &out, const std::string &name, const TrialReport &r, const Dataset &dataset);

/// synth -> segment -> train -> trials -> baseline -> compare -> simulate, all under `root`.
void run_pipeline(const PipelineConfig &cfg, const std::filesystem::path &root,
                  const std::optional<std::filesystem::path> &input_csv = std::nullopt, bool record_time = false);

} // namespace eba
