#include "eba/training.hpp"

#include "eba/parallel.hpp"
#include "eba/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eba {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

MapeObjective::MapeObjective(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                             Weighting mode, double exact_match_epsilon)
    : k_(k), mode_(mode), epsilon_(exact_match_epsilon) {
	if (historical.empty() || training.empty())
		throw std::invalid_argument("objective needs nonempty historical and training sets");
	if (k < 1)
		throw std::invalid_argument("k must be at least 1");

	std::vector<const JobRecord *> hist;
	hist.reserve(historical.size());
	for (const auto &j : historical)
		hist.push_back(&j);
	std::sort(hist.begin(), hist.end(), [](const JobRecord *a, const JobRecord *b) { return a->id < b->id; });

	const auto rows = static_cast<Eigen::Index>(training.size());
	const auto cols = static_cast<Eigen::Index>(hist.size());
	collection_.resize(rows, cols);
	delivery_.resize(rows, cols);
	time_.resize(rows, cols);
	load_.resize(rows, cols);
	for (Eigen::Index i = 0; i < rows; ++i) {
		const auto &probe = training[static_cast<std::size_t>(i)];
		for (Eigen::Index j = 0; j < cols; ++j) {
			const auto t = distance_terms(probe, *hist[static_cast<std::size_t>(j)]);
			collection_(i, j) = t.collection_km;
			delivery_(i, j) = t.delivery_km;
			time_(i, j) = t.time_sq;
			load_(i, j) = t.load_sq;
		}
		probe_load_.push_back(probe.load_size);
		probe_cost_.push_back(probe.cost_eur);
	}
	for (const auto *h : hist) {
		hist_ids_.push_back(h->id);
		hist_norm_cost_.push_back(normalized_cost(*h));
	}
}

double MapeObjective::operator()(const Eigen::Ref<const Eigen::Vector4d> &raw_weights, unsigned workers) const {
	if (!raw_weights.allFinite())
		return kInf;
	const auto w = AttributeWeights::clamped(raw_weights);
	EstimatorConfig cfg;
	cfg.k = k_;
	cfg.weights = w;
	cfg.mode = mode_;
	cfg.exact_match_epsilon = epsilon_;

	const auto rows = collection_.rows();
	std::vector<double> ape(static_cast<std::size_t>(rows));
	parallel_for(static_cast<std::size_t>(rows), workers, [&](std::size_t begin, std::size_t end) {
		Eigen::RowVectorXd d(collection_.cols());
		NeighborSelector selector(static_cast<std::size_t>(k_));
		for (std::size_t r = begin; r < end; ++r) {
			const auto i = static_cast<Eigen::Index>(r);
			d = (w.collection * collection_.row(i) + w.delivery * delivery_.row(i) + w.time * time_.row(i) +
			     w.load * load_.row(i))
			        .cwiseSqrt();
			selector.reset();
			for (Eigen::Index j = 0; j < d.size(); ++j) {
				const auto jj = static_cast<std::size_t>(j);
				if (selector.admits(d[j], hist_ids_[jj]))
					selector.offer({hist_ids_[jj], d[j], hist_norm_cost_[jj]});
			}
			const double est = blend_neighbors(selector.neighbors(), probe_load_[r], cfg);
			ape[r] = std::isfinite(est) ? 100.0 * std::abs(est - probe_cost_[r]) / probe_cost_[r] : kInf;
		}
	});

	double sum = 0.0;
	for (const double a : ape)
		sum += a;
	const double m = sum / static_cast<double>(ape.size());
	return std::isfinite(m) ? m : kInf;
}

double objective_mape(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                      const Eigen::Vector4d &raw_weights, Weighting mode) {
	return MapeObjective(historical, training, k, mode)(raw_weights);
}

void TrainingConfig::validate() const {
	if (random_iterations < 0)
		throw std::invalid_argument("random_iterations must be non-negative");
	if (k_range.empty())
		throw std::invalid_argument("k_range must be nonempty");
	for (const int k : k_range)
		if (k < 1)
			throw std::invalid_argument("k values must be at least 1");
	simplex.validate();
}

TrainingConfig TrainingConfig::paper_fidelity() {
	TrainingConfig cfg;
	cfg.random_iterations = kPaperRandomIterations;
	cfg.simplex.max_iterations = kPaperSimplexIterations;
	return cfg;
}

AttributeWeights random_candidate(std::uint64_t seed, std::uint64_t index) {
	if (index == 0)
		return {1.0, 1.0, 1.0, 1.0};
	Rng rng(seed, index);
	AttributeWeights w;
	w.collection = rng.uniform();
	w.delivery = rng.uniform();
	w.time = rng.uniform();
	w.load = rng.uniform();
	return w;
}

RandomSearchResult random_search(const MapeObjective &objective, const TrainingConfig &cfg) {
	cfg.validate();
	const auto n = static_cast<std::size_t>(cfg.random_iterations) + 1;
	std::vector<double> scores(n);
	parallel_for(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
		for (std::size_t i = begin; i < end; ++i)
			scores[i] = objective.evaluate(random_candidate(cfg.seed, i));
	});

	RandomSearchResult best;
	best.iterations = cfg.random_iterations;
	best.best_index = 0;
	best.mape = scores[0];
	for (std::size_t i = 1; i < n; ++i) {
		if (scores[i] < best.mape) {
			best.mape = scores[i];
			best.best_index = i;
		}
	}
	best.weights = random_candidate(cfg.seed, best.best_index);
	return best;
}

RandomSearchResult random_search(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                                 const TrainingConfig &cfg) {
	return random_search(MapeObjective(historical, training, k, cfg.mode), cfg);
}

TrainedModel fine_tune(const MapeObjective &objective, const AttributeWeights &start,
                       const SimplexOptions<double> &opts, unsigned workers) {
	const Eigen::Vector4d x0 = start.as_vector();
	if (!x0.allFinite())
		throw std::invalid_argument("fine_tune needs a finite start");

	const auto result = minimize<double>(
	    [&](const Eigen::VectorXd &x) { return objective(Eigen::Vector4d(x), workers); }, Eigen::VectorXd(x0), opts);

	TrainedModel m;
	m.k = objective.k();
	m.weights = AttributeWeights::clamped(Eigen::Vector4d(result.x));
	m.training_mape = result.f;
	m.random_search_mape = objective(x0, workers);
	m.simplex_iterations = result.iterations;
	m.simplex_evaluations = result.evaluations;
	m.simplex_converged = result.converged;
	return m;
}

TrainedModel fine_tune(std::span<const JobRecord> historical, std::span<const JobRecord> training, int k,
                       const AttributeWeights &start, const SimplexOptions<double> &opts) {
	return fine_tune(MapeObjective(historical, training, k), start, opts);
}

std::map<int, TrainedModel> train_all(std::span<const JobRecord> historical, std::span<const JobRecord> training,
                                      const TrainingConfig &cfg) {
	cfg.validate();
	std::map<int, TrainedModel> models;
	for (const int k : cfg.k_range) {
		if (models.contains(k))
			continue;
		const MapeObjective objective(historical, training, k, cfg.mode);
		const auto search = random_search(objective, cfg);
		auto model = fine_tune(objective, search.weights, cfg.simplex, cfg.workers);
		model.mode = cfg.mode;
		model.random_iterations = cfg.random_iterations;
		model.seed = cfg.seed;
		models.emplace(k, model);
	}
	return models;
}

} // namespace eba
