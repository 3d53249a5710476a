#pragma once

#include "eba/knn.hpp"
#include "eba/simplex.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace eba {

/// Training-set MAPE as a function of the four raw weights.
///
/// The unweighted distance terms between every training and historical job are computed once;
/// each evaluation is then a weighted sum of four dense matrices followed by neighbor selection
/// and blending through the same code path as estimate_cost. Negative weight components are
/// clamped to zero. Returns +infinity when any estimate is non-finite.
class MapeObjective {
public:
	MapeObjective(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
	              Weighting mode = Weighting::as_printed, double exact_match_epsilon = 1e-9);

	double operator()(const Eigen::Ref<const Eigen::Vector4d> &raw_weights, unsigned workers = 1) const;
	double evaluate(const AttributeWeights &w, unsigned workers = 1) const {
		return (*this)(w.as_vector(), workers);
	}

	int k() const noexcept { return k_; }
	std::size_t training_size() const noexcept { return probe_load_.size(); }
	std::size_t historical_size() const noexcept { return hist_ids_.size(); }

private:
	using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

	int k_;
	Weighting mode_;
	double epsilon_;
	RowMatrix collection_, delivery_, time_, load_; // training x historical
	std::vector<JobId> hist_ids_;
	std::vector<double> hist_norm_cost_;
	std::vector<double> probe_load_;
	std::vector<double> probe_cost_;
};

/// One-shot form of MapeObjective. Throws std::invalid_argument on empty sets.
double objective_mape(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                      const Eigen::Vector4d &raw_weights, Weighting mode = Weighting::as_printed);

struct TrainingConfig {
	static constexpr int kPaperRandomIterations = 22500;
	static constexpr int kPaperSimplexIterations = 2500;
	static constexpr int kDeskRandomIterations = 500;

	int random_iterations = kDeskRandomIterations;
	SimplexOptions<double> simplex;
	std::uint64_t seed = 0;
	std::vector<int> k_range{1, 2, 3, 4, 5, 6};
	Weighting mode = Weighting::as_printed;
	unsigned workers = 1;

	void validate() const;
	/// Full-length search and fine-tuning.
	static TrainingConfig paper_fidelity();
};

struct RandomSearchResult {
	AttributeWeights weights;
	double mape = 0.0;
	std::uint64_t best_index = 0; ///< 0 is the equal-weights candidate
	int iterations = 0;
};

/// Candidate 0 is (1,1,1,1); candidate i >= 1 draws four uniforms on [0,1) from substream (seed, i).
/// The lowest MAPE wins; ties go to the lowest candidate index.
RandomSearchResult random_search(const MapeObjective &objective, const TrainingConfig &cfg);
RandomSearchResult random_search(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                                 const TrainingConfig &cfg);

/// The i-th random candidate of a search seeded with `seed`.
AttributeWeights random_candidate(std::uint64_t seed, std::uint64_t index);

struct TrainedModel {
	int k = 1;
	AttributeWeights weights;
	Weighting mode = Weighting::as_printed;
	double training_mape = 0.0;
	double random_search_mape = 0.0;
	int random_iterations = 0;
	int simplex_iterations = 0;
	int simplex_evaluations = 0;
	bool simplex_converged = false;
	std::uint64_t seed = 0;
};

/// Simplex refinement of `start` on the objective. training_mape <= objective(start).
TrainedModel fine_tune(const MapeObjective &objective, const AttributeWeights &start,
                       const SimplexOptions<double> &opts, unsigned workers = 1);
TrainedModel fine_tune(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                       const AttributeWeights &start, const SimplexOptions<double> &opts);

/// Random search then fine-tuning for each k in cfg.k_range.
std::map<int, TrainedModel> train_all(std::span<const JobRecord> historical, std::span<const JobRecord> training,
                                      const TrainingConfig &cfg);

} // namespace eba
