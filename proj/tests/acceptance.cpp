// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "eba/backtest.hpp"
#include "eba/economics.hpp"
#include "eba/geo.hpp"
#include "eba/knn.hpp"
#include "eba/pipeline.hpp"
#include "eba/regression.hpp"
#include "eba/simplex.hpp"
#include "eba/stats.hpp"
#include "eba/synth.hpp"
#include "eba/training.hpp"
#include "helpers.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

using namespace eba;
namespace fs = std::filesystem;

namespace {

struct Outcome {
	bool pass = false;
	std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
	return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(const char *f, auto... args) {
	char buf[512];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

// ---------------------------------------------------------------------------------------------
// AC1

struct CityPair {
	const char *name;
	GeoPoint a, b;
	double wgs84_km; // geographiclib Geodesic.WGS84 Inverse
};

constexpr std::array<CityPair, 20> kCityPairs{{
    {"Dublin-London", {53.3498, -6.2603}, {51.5074, -0.1278}, 464.581364},
    {"Dublin-Rotterdam", {53.3498, -6.2603}, {51.9244, 4.4777}, 743.283266},
    {"Dublin-Paris", {53.3498, -6.2603}, {48.8566, 2.3522}, 782.495445},
    {"Dublin-Madrid", {53.3498, -6.2603}, {40.4168, -3.7038}, 1450.636239},
    {"Dublin-Shanghai", {53.3498, -6.2603}, {31.2304, 121.4737}, 9367.507874},
    {"Dublin-NewYork", {53.3498, -6.2603}, {40.7128, -74.006}, 5128.500094},
    {"London-Berlin", {51.5074, -0.1278}, {52.52, 13.405}, 934.523350},
    {"Rome-Warsaw", {41.9028, 12.4964}, {52.2297, 21.0122}, 1315.676274},
    {"Oslo-Lisbon", {59.9139, 10.7522}, {38.7223, -9.1393}, 2740.838481},
    {"Dublin-Cork", {53.3498, -6.2603}, {51.8985, -8.4756}, 220.404459},
    {"Dublin-Belfast", {53.3498, -6.2603}, {54.5973, -5.9301}, 140.532221},
    {"Istanbul-Reykjavik", {41.0082, 28.9784}, {64.1466, -21.9426}, 4130.762273},
    {"Sydney-SaoPaulo", {-33.8688, 151.2093}, {-23.5505, -46.6333}, 13376.629324},
    {"CapeTown-Tokyo", {-33.9249, 18.4241}, {35.6762, 139.6503}, 14725.335504},
    {"Anchorage-Singapore", {61.2181, -149.9003}, {1.3521, 103.8198}, 10739.147256},
    {"NewYork-Tokyo", {40.7128, -74.006}, {35.6762, 139.6503}, 10875.723685},
    {"Madrid-Sydney", {40.4168, -3.7038}, {-33.8688, 151.2093}, 17687.895549},
    {"Singapore-SaoPaulo", {1.3521, 103.8198}, {-23.5505, -46.6333}, 15999.728834},
    {"Rotterdam-Shanghai", {51.9244, 4.4777}, {31.2304, 121.4737}, 8947.218931},
    {"Cork-Anchorage", {51.8985, -8.4756}, {61.2181, -149.9003}, 7004.141065},
}};

Outcome geodesic_correctness() {
	const auto t0 = std::chrono::steady_clock::now();
	double worst = 0.0;
	const char *worst_name = "";
	int violations = 0;
	for (const auto &p : kCityPairs) {
		const double d = haversine_km(p.a, p.b);
		const double rel = std::abs(d - p.wgs84_km) / p.wgs84_km;
		if (rel > worst) {
			worst = rel;
			worst_name = p.name;
		}
		violations += rel > 0.005;
		violations += d != haversine_km(p.b, p.a);
		violations += haversine_km(p.a, p.a) != 0.0 || haversine_km(p.b, p.b) != 0.0;
	}
	const double elapsed = seconds_since(t0);
	return {violations == 0 && elapsed < 1.0,
	        fmt("worst %.3f%% (%s), %d violations", 100 * worst, worst_name, violations)};
}

// ---------------------------------------------------------------------------------------------
// AC2: exhaustive-scan oracle, written against the definition rather than the selector.

struct OracleEstimate {
	std::vector<JobId> ids;
	std::vector<double> distances;
	double cost = 0.0;
	bool exact = false;
};

OracleEstimate brute_force(std::span<const JobRecord> pool, const JobRecord &probe, int k, const AttributeWeights &w,
                           Weighting mode, double eps = 1e-9) {
	struct Candidate {
		double d;
		JobId id;
		double nc;
	};
	std::vector<Candidate> all;
	all.reserve(pool.size());
	for (const auto &h : pool) {
		const double dc = haversine_km(probe.collection, h.collection);
		const double dd = haversine_km(probe.delivery, h.delivery);
		const double dt = static_cast<double>(h.date - probe.date);
		const double dl = h.load_size - probe.load_size;
		const double d = std::sqrt(w.collection * dc + w.delivery * dd + w.time * (dt * dt) + w.load * (dl * dl));
		all.push_back({d, h.id, h.cost_eur / h.load_size});
	}
	std::sort(all.begin(), all.end(), [](const Candidate &a, const Candidate &b) {
		return a.d != b.d ? a.d < b.d : a.id < b.id;
	});
	all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(k)));

	OracleEstimate out;
	double exact_sum = 0.0;
	int exact_n = 0;
	for (const auto &c : all) {
		out.ids.push_back(c.id);
		out.distances.push_back(c.d);
		if (c.d <= eps) {
			exact_sum += c.nc;
			++exact_n;
		}
	}
	if (exact_n > 0) {
		out.exact = true;
		out.cost = exact_sum / exact_n * probe.load_size;
		return out;
	}
	const auto weight = [&](double d) { return mode == Weighting::as_printed ? d : 1.0 / d; };
	double total = 0.0;
	for (const auto &c : all)
		total += weight(c.d);
	double blended = 0.0;
	for (const auto &c : all)
		blended += (weight(c.d) / total) * c.nc;
	out.cost = probe.load_size * blended;
	return out;
}

AttributeWeights random_weights(Rng &rng) {
	AttributeWeights w{rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 1e-3), rng.uniform(0, 5e4)};
	// Occasionally silence one attribute.
	if (rng.uniform() < 0.2)
		w.time = 0.0;
	if (rng.uniform() < 0.1)
		w.collection = 0.0;
	return w;
}

Outcome knn_oracle_equivalence() {
	const auto t0 = std::chrono::steady_clock::now();
	Rng rng(2002);
	int probes = 0, mismatches = 0, exact_paths = 0;
	for (std::uint64_t ds = 0; ds < 50; ++ds) {
		const std::size_t n = 20 + rng.index(981);
		const auto pool = testing::random_jobs(n, 100 + ds);
		auto probes_set = testing::random_jobs(30, 900 + ds);
		// A few duplicates of pool members exercise the exact-match path.
		for (std::size_t i = 0; i < 4; ++i) {
			auto dup = pool[rng.index(pool.size())];
			dup.id = 10000 + i;
			dup.cost_eur = 1.0;
			probes_set.push_back(dup);
		}
		for (const auto mode : {Weighting::as_printed, Weighting::inverse_distance}) {
			for (const auto &probe : probes_set) {
				EstimatorConfig cfg;
				cfg.k = 1 + static_cast<int>(rng.index(6));
				cfg.weights = random_weights(rng);
				cfg.mode = mode;
				const auto got = estimate_detailed(pool, probe, cfg);
				const auto want = brute_force(pool, probe, cfg.k, cfg.weights, mode);
				++probes;
				exact_paths += want.exact;
				bool same = got.cost == want.cost && got.exact_match == want.exact &&
				            got.neighbors.size() == want.ids.size();
				for (std::size_t i = 0; same && i < want.ids.size(); ++i)
					same = got.neighbors[i].id == want.ids[i] && got.neighbors[i].distance == want.distances[i];
				mismatches += !same;
			}
		}
	}
	const double elapsed = seconds_since(t0);
	return {mismatches == 0 && elapsed < 30.0,
	        fmt("%d probes, %d exact-match paths, %d mismatches", probes, exact_paths, mismatches)};
}

// ---------------------------------------------------------------------------------------------
// AC3

std::vector<JobId> ids_of(const Estimate &e) {
	std::vector<JobId> ids;
	for (const auto &n : e.neighbors)
		ids.push_back(n.id);
	return ids;
}

Outcome invariance_suite() {
	Rng rng(3003);
	int violations = 0;
	int scale = 0, equivariance = 0, permutation = 0, bounds = 0;
	for (int probe_no = 0; probe_no < 1000; ++probe_no) {
		const std::size_t n = 10 + rng.index(191);
		auto pool = testing::random_jobs(n, 40000 + static_cast<std::uint64_t>(probe_no));
		const auto probe = testing::random_jobs(1, 80000 + static_cast<std::uint64_t>(probe_no)).front();
		EstimatorConfig cfg;
		cfg.k = 1 + static_cast<int>(rng.index(6));
		cfg.weights = random_weights(rng);
		cfg.mode = rng.uniform() < 0.5 ? Weighting::as_printed : Weighting::inverse_distance;
		const auto base = estimate_detailed(pool, probe, cfg);

		for (const double c : {1e-3, 1.0, 1e3}) {
			auto scaled = cfg;
			const Eigen::Vector4d v = cfg.weights.as_vector() * c;
			scaled.weights = AttributeWeights::from_vector(v);
			const auto e = estimate_detailed(pool, probe, scaled);
			const bool ok = ids_of(e) == ids_of(base) && rel_close(e.cost, base.cost, 1e-12);
			scale += !ok;
		}

		const double gamma = rng.uniform(0.01, 100.0);
		auto priced = pool;
		for (auto &j : priced)
			j.cost_eur *= gamma;
		const auto eq = estimate_detailed(priced, probe, cfg);
		equivariance += !(ids_of(eq) == ids_of(base) && rel_close(eq.cost, gamma * base.cost, 1e-12));

		auto shuffled = pool;
		for (std::size_t i = shuffled.size(); i > 1; --i)
			std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
		const auto perm = estimate_detailed(shuffled, probe, cfg);
		permutation += !(ids_of(perm) == ids_of(base) && perm.cost == base.cost);

		double lo = INFINITY, hi = -INFINITY;
		for (const auto &nb : base.neighbors) {
			lo = std::min(lo, nb.normalized_cost * probe.load_size);
			hi = std::max(hi, nb.normalized_cost * probe.load_size);
		}
		// A floating-point convex combination may land one rounding step outside.
		bounds += !(base.cost >= lo * (1 - 1e-12) && base.cost <= hi * (1 + 1e-12));
	}
	violations = scale + equivariance + permutation + bounds;
	return {violations == 0, fmt("1000 probes; violations: scale %d, cost %d, permutation %d, bounds %d", scale,
	                             equivariance, permutation, bounds)};
}

// ---------------------------------------------------------------------------------------------
// AC4

bool non_increasing(const std::vector<double> &trace) {
	return std::adjacent_find(trace.begin(), trace.end(), std::less<>{}) == trace.end();
}

Outcome optimizer_benchmarks() {
	using Vec = Eigen::VectorXd;
	Vec x4(4);
	x4 << 1.0, -2.0, 0.5, 3.0;
	const auto sphere = minimize([](const Vec &x) { return x.squaredNorm(); }, x4);

	Vec x0(2);
	x0 << -1.2, 1.0;
	SimplexOptions<double> capped;
	capped.max_iterations = 500;
	const auto rosen = minimize(
	    [](const Vec &x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); }, x0, capped);
	const double rosen_err = (rosen.x - Vec::Ones(2)).cwiseAbs().maxCoeff();

	const bool monotone = non_increasing(sphere.best_trace) && non_increasing(rosen.best_trace);
	const bool pass = sphere.f < 1e-10 && rosen_err < 1e-4 && rosen.iterations <= 500 && monotone;
	return {pass, fmt("sphere f %.2e in %d it; rosenbrock |x-1| %.2e in %d it; monotone %s", sphere.f,
	                  sphere.iterations, rosen_err, rosen.iterations, monotone ? "yes" : "no")};
}

// ---------------------------------------------------------------------------------------------
// AC5 and AC6 share one trained dataset.

struct TrainedFixture {
	Dataset dataset;
	Segmentation seg;
	std::vector<JobRecord> historical, training;
	std::map<int, TrainedModel> models;
	double train_seconds = 0.0;
};

const TrainedFixture &trained_fixture() {
	static const TrainedFixture fixture = [] {
		TrainedFixture f;
		SyntheticSpec spec;
		spec.n_jobs = 2000;
		spec.n_lanes = 5;
		spec.seed = 505;
		f.dataset = generate(spec);
		f.seg = segment(f.dataset, 506);
		f.historical = f.dataset.select(f.seg.historical);
		f.training = f.dataset.select(f.seg.training);
		TrainingConfig cfg;
		cfg.seed = 507;
		cfg.workers = 4;
		const auto t0 = std::chrono::steady_clock::now();
		f.models = train_all(f.historical, f.training, cfg);
		f.train_seconds = seconds_since(t0);
		return f;
	}();
	return fixture;
}

Outcome training_dominance() {
	const auto &f = trained_fixture();
	int violations = 0;
	std::ostringstream mapes;
	for (int k = 1; k <= 6; ++k) {
		const auto it = f.models.find(k);
		if (it == f.models.end()) {
			++violations;
			continue;
		}
		const auto &m = it->second;
		const double unit = objective_mape(f.historical, f.training, k, Eigen::Vector4d::Ones());
		violations += !(m.training_mape <= unit);
		violations += !(m.training_mape <= m.random_search_mape);
		mapes << " k" << k << "=" << fmt("%.2f", m.training_mape) << "/" << fmt("%.2f", unit);
	}
	return {violations == 0 && f.train_seconds < 300.0,
	        fmt("trained/unit MAPE%s; %d violations; training %.1f s", mapes.str().c_str(), violations,
	            f.train_seconds)};
}

Outcome walk_forward_integrity() {
	const auto &f = trained_fixture();
	TrialConfig cfg;
	cfg.k = 5;
	cfg.weights = f.models.at(5).weights;
	cfg.lag_days = 30;
	const auto report = run_trial(f.seg, f.dataset, cfg);

	std::vector<JobRecord> knowledge = f.historical;
	knowledge.insert(knowledge.end(), f.training.begin(), f.training.end());
	std::unordered_set<JobId> knowledge_ids;
	for (const auto &j : knowledge)
		knowledge_ids.insert(j.id);

	int look_ahead = 0, recompute = 0;
	double ape_sum = 0.0;
	for (const auto &row : report.rows) {
		const auto &probe = f.dataset.at(row.id);
		std::vector<JobRecord> eligible;
		for (const auto &j : knowledge)
			if (j.date <= probe.date - 30)
				eligible.push_back(j);
		for (const JobId n : row.neighbors)
			look_ahead += !knowledge_ids.contains(n) || f.dataset.at(n).date > row.date - 30;
		if (eligible.empty()) {
			++recompute;
			continue;
		}
		const auto want = brute_force(eligible, probe, cfg.k, cfg.weights, cfg.mode);
		recompute += want.ids != row.neighbors || want.cost != row.estimate;
		ape_sum += 100.0 * std::abs(row.estimate - probe.cost_eur) / probe.cost_eur;
	}
	for (const auto &s : report.skipped) {
		const auto &probe = f.dataset.at(s.id);
		look_ahead += std::any_of(knowledge.begin(), knowledge.end(),
		                          [&](const JobRecord &j) { return j.date <= probe.date - 30; });
	}
	const bool covered = report.rows.size() + report.skipped.size() == f.seg.test.size();
	const double mape = ape_sum / static_cast<double>(report.rows.size());
	const bool mape_ok = std::abs(report.overall.mape - mape) <= 1e-12 * mape;
	return {look_ahead == 0 && recompute == 0 && covered && mape_ok,
	        fmt("%zu rows, %zu skipped; look-ahead %d, estimate mismatches %d; MAPE %.12f vs %.12f", report.rows.size(),
	            report.skipped.size(), look_ahead, recompute, report.overall.mape, mape)};
}

// ---------------------------------------------------------------------------------------------
// AC7: default synthetic costs carry no date trend, so the day term is pure noise.

Outcome trained_vs_untrained() {
	int detected = 0;
	std::ostringstream ps;
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		SyntheticSpec spec;
		spec.n_jobs = 2000;
		spec.annual_trend = 0.0;
		spec.seed = 700 + seed;
		const auto ds = generate(spec);
		const auto seg = segment(ds, seed);
		TrainingConfig tc;
		tc.k_range = {5};
		tc.seed = seed;
		const auto models = train_all(ds.select(seg.historical), ds.select(seg.training), tc);

		TrialConfig trained;
		trained.k = 5;
		trained.weights = models.at(5).weights;
		TrialConfig untrained = trained;
		untrained.weights = {};
		const auto cmp = compare_reports(run_trial(seg, ds, trained), run_trial(seg, ds, untrained));
		const bool ok = cmp.reject && cmp.test.p < 0.05 && cmp.mape_trained < cmp.mape_untrained;
		detected += ok;
		ps << fmt(" %.1f/%.1f", cmp.mape_trained, cmp.mape_untrained);
	}
	return {detected >= 8, fmt("%d/10 seeds detected; trained/untrained MAPE%s", detected, ps.str().c_str())};
}

// ---------------------------------------------------------------------------------------------
// AC8

Outcome margin_solver() {
	SyntheticSpec spec;
	spec.n_jobs = 2000;
	spec.margin = 0.151;
	spec.margin_noise = 0.0;
	spec.seed = 808;
	const auto ds = generate(spec);
	const auto profile = derive_manual_margin(ds.jobs());
	double worst_error = 0.0;
	const auto jobs = ds.jobs();
	for (std::size_t i = 0; i < jobs.size(); ++i)
		worst_error = std::max(worst_error, std::abs(profile.error_eur[i]) / jobs[i].cost_eur);
	const bool recovered = std::abs(profile.margin - 0.151) <= 1e-12 && worst_error <= 1e-12;

	const std::vector<CostRevenue> mixed{{100, 110}, {100, 130}};
	const auto m = derive_manual_margin(mixed);
	const bool example = std::abs(m.margin - 0.20) <= 1e-9 && std::abs(m.error_eur[0] + 25.0 / 3.0) <= 1e-9 &&
	                     std::abs(m.error_eur[1] - 25.0 / 3.0) <= 1e-9;
	return {recovered && example, fmt("|t-0.151| %.1e, max |e|/C %.1e; mixed t %.12f e %.10f %.10f",
	                                  std::abs(profile.margin - 0.151), worst_error, m.margin, m.error_eur[0],
	                                  m.error_eur[1])};
}

// ---------------------------------------------------------------------------------------------
// AC9: reference values from scipy.stats / numpy, t quantiles cross-checked with mpmath.

Outcome statistics_oracles() {
	int failures = 0, checked = 0;
	const auto expect = [&](double got, double want) {
		++checked;
		failures += !rel_close(got, want, 1e-8);
	};

	expect(stats::percentile(std::vector<double>{10, 20, 30, 40}, 0.75), 32.5);
	expect(stats::percentile(std::vector<double>{3.1, 0.4, 7.7, 2.2, 9.0}, 0.3), 2.38);

	const auto ci = stats::mean_ci(std::vector<double>{1, 2, 3, 4, 5});
	expect(ci.mean, 3.0);
	expect(ci.se, 0.7071067811865476);
	expect(ci.low, 1.036756838522439);
	expect(ci.high, 4.9632431614775605);

	const std::vector<double> x{0, 3, 7, 12, 15, 21, 26, 30, 34, 40};
	const std::vector<double> y{12.1, 10.4, 13.9, 11.2, 15.8, 14.1, 16.9, 13.3, 18.2, 17.5};
	const auto s = stats::ols_slope_test(x, y);
	expect(s.slope, 0.15446685878962532);
	expect(s.intercept, 11.436023054755042);
	expect(s.se, 0.04379994624861855);
	expect(s.t, 3.5266449395356783);
	expect(s.p_value, 0.007770020172294639);
	expect(s.ci_low, 0.05346400161859076);
	expect(s.ci_high, 0.25546971596065987);

	const std::vector<double> a{23.1, 40.2, 18.7, 55.0, 31.4, 27.9};
	const std::vector<double> b{20.5, 35.1, 19.9, 47.3, 30.2, 22.8};
	const auto two = stats::paired_t_test(a, b, stats::Sided::two);
	expect(two.t, 2.6228218831770644);
	expect(two.p, 0.04693770946897909);
	expect(stats::paired_t_test(a, b, stats::Sided::b_less_than_a).p, 0.023468854734489546);

	const std::vector<double> u{1.2, 2.4, 3.1, 4.8, 5.0, 6.3, 7.7, 8.1};
	const std::vector<double> v{2.0, 2.9, 3.8, 4.1, 6.2, 5.9, 8.4, 7.6};
	expect(stats::pearson(u, v), 0.9590753793462293);

	expect(stats::student_t_quantile(0.975, 10), 2.2281388519862742);
	return {failures == 0, fmt("%d reference values, %d outside 1e-8", checked, failures)};
}

// ---------------------------------------------------------------------------------------------
// AC10

bool aic_strictly_decreasing(const LinearModel &m) {
	for (std::size_t i = 1; i < m.steps.size(); ++i)
		if (!(m.steps[i].aic < m.steps[i - 1].aic))
			return false;
	return true;
}

Outcome stepwise_regression() {
	int aic_failures = 0;

	auto exact = testing::random_jobs(60, 1);
	for (auto &j : exact) {
		j.col_country = j.del_country = "IE";
		j.cost_eur = 5.0 + 3.0 * j.load_size;
	}
	const auto lin = fit_stepwise(exact);
	const bool exact_ok = !lin.groups.empty() && lin.groups.front() == PredictorGroup::load_size &&
	                      rel_close(lin.intercept, 5.0, 1e-8) && rel_close(lin.coefficients[0], 3.0, 1e-8);
	aic_failures += !aic_strictly_decreasing(lin);

	// Informative: load and crow distance. Noise: date and both country factors.
	const std::array<const char *, 4> countries{"IE", "GB", "FR", "DE"};
	int correct = 0;
	for (std::uint64_t seed = 0; seed < 100; ++seed) {
		auto jobs = testing::random_jobs(500, 1000 + seed);
		Rng rng(seed, 10);
		for (auto &j : jobs) {
			j.col_country = countries[rng.index(countries.size())];
			j.del_country = countries[rng.index(countries.size())];
			j.cost_eur = 200.0 + 1500.0 * j.load_size + 0.8 * crow_distance_km(j) + 20.0 * rng.normal();
		}
		const auto m = fit_stepwise(jobs);
		const std::set<PredictorGroup> support(m.groups.begin(), m.groups.end());
		correct += support == std::set<PredictorGroup>{PredictorGroup::load_size, PredictorGroup::crow_distance};
		aic_failures += !aic_strictly_decreasing(m);
	}
	return {exact_ok && correct >= 95 && aic_failures == 0,
	        fmt("exact fit %s; correct support %d/100; AIC increases %d", exact_ok ? "ok" : "off", correct,
	            aic_failures)};
}

// ---------------------------------------------------------------------------------------------
// AC11

AuctionConfig empirical_auction(std::uint64_t seed) {
	Rng rng(seed);
	AuctionConfig cfg;
	cfg.seed = seed;
	for (int i = 0; i < 300; ++i) {
		cfg.costs.push_back(rng.uniform(50, 5000));
		cfg.manual_errors.push_back(rng.normal(0, 0.3));
		cfg.method_errors.push_back(rng.normal(0, 0.2));
	}
	return cfg;
}

bool identical(const IndifferenceResult &a, const IndifferenceResult &b) {
	return a.profit_manual == b.profit_manual && a.profit_method == b.profit_method &&
	       a.indifference_cost == b.indifference_cost && a.se == b.se && a.ci_low == b.ci_low &&
	       a.ci_high == b.ci_high && a.win_rate_manual == b.win_rate_manual && a.win_rate_method == b.win_rate_method;
}

Outcome monte_carlo_economics() {
	const auto t0 = std::chrono::steady_clock::now();
	auto same = empirical_auction(11);
	same.method_errors = same.manual_errors;
	const auto zero = simulate_indifference(same);
	const bool zero_ok = zero.indifference_cost == 0.0;

	// Enumerating the twelve equally likely outcomes gives C_e = 49.525 exactly.
	AuctionConfig discrete;
	discrete.n_bidders = 3;
	discrete.target_margin = 0.151;
	discrete.trials = 25000;
	discrete.costs = {100, 200, 400};
	discrete.manual_errors = {0.0};
	discrete.method_errors = {-0.5, 0.5};
	discrete.competitor_errors = {0.0};
	discrete.seed = 2024;
	const auto d = simulate_indifference(discrete);
	const bool covered = d.ci_low <= 49.525 && 49.525 <= d.ci_high;

	auto repro = empirical_auction(12);
	const auto r1 = simulate_indifference(repro);
	const auto r2 = simulate_indifference(repro);
	repro.workers = 4;
	const auto r4 = simulate_indifference(repro);
	const bool bit_identical = identical(r1, r2) && identical(r1, r4);

	const double elapsed = seconds_since(t0);
	return {zero_ok && covered && bit_identical && elapsed < 10.0,
	        fmt("identical arms C_e %g; discrete CI [%.3f, %.3f]; bit-identical %s; %.2f s", zero.indifference_cost,
	            d.ci_low, d.ci_high, bit_identical ? "yes" : "no", elapsed)};
}

// ---------------------------------------------------------------------------------------------
// AC12

std::map<std::string, std::string> snapshot(const fs::path &root) {
	std::map<std::string, std::string> files;
	for (const auto &entry : fs::recursive_directory_iterator(root))
		if (entry.is_regular_file())
			files[fs::relative(entry.path(), root).string()] = read_file(entry.path());
	return files;
}

Outcome end_to_end_reproducibility() {
	const fs::path root = fs::temp_directory_path() / "eba_acceptance_pipeline";
	fs::remove_all(root);
	fs::create_directories(root);
	const auto run = [&](const std::string &name, unsigned workers, double &secs) {
		const auto t0 = std::chrono::steady_clock::now();
		const std::string cmd = std::string(EBA_CLI_PATH) + " --seed 42 --workers " + std::to_string(workers) +
		                        " --out " + (root / name).string() + " pipeline > /dev/null 2>&1";
		const int status = std::system(cmd.c_str());
		secs = seconds_since(t0);
		return WIFEXITED(status) && WEXITSTATUS(status) == 0;
	};
	double t_a = 0, t_b = 0, t_c = 0;
	const bool ran = run("a", 1, t_a) && run("b", 1, t_b) && run("c", 4, t_c);
	bool same_seed = false, same_workers = false;
	std::size_t files = 0;
	if (ran) {
		const auto a = snapshot(root / "a");
		files = a.size();
		same_seed = a == snapshot(root / "b");
		same_workers = a == snapshot(root / "c");
	}
	fs::remove_all(root);
	const double slowest = std::max({t_a, t_b, t_c});
	return {ran && files > 0 && same_seed && same_workers && slowest < 600.0,
	        fmt("%zu files; repeat identical %s; 1 vs 4 workers identical %s; runs %.0f/%.0f/%.0f s", files,
	            same_seed ? "yes" : "no", same_workers ? "yes" : "no", t_a, t_b, t_c)};
}

} // namespace

int main() {
	struct Criterion {
		const char *name;
		std::function<Outcome()> check;
	};
	const std::array<Criterion, 12> criteria{{
	    {"geodesic correctness", geodesic_correctness},
	    {"k-NN oracle equivalence", knn_oracle_equivalence},
	    {"invariance suite", invariance_suite},
	    {"optimizer benchmarks", optimizer_benchmarks},
	    {"training dominance", training_dominance},
	    {"walk-forward integrity", walk_forward_integrity},
	    {"trained vs untrained", trained_vs_untrained},
	    {"manual margin solver", margin_solver},
	    {"statistics oracles", statistics_oracles},
	    {"stepwise regression", stepwise_regression},
	    {"Monte Carlo economics", monte_carlo_economics},
	    {"end-to-end reproducibility", end_to_end_reproducibility},
	}};

	int failed = 0;
	for (std::size_t i = 0; i < criteria.size(); ++i) {
		const auto t0 = std::chrono::steady_clock::now();
		Outcome o;
		try {
			o = criteria[i].check();
		} catch (const std::exception &e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		failed += !o.pass;
		std::printf("AC%-2zu %s  %-27s %8.2f s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].name,
		            seconds_since(t0), o.detail.c_str());
		std::fflush(stdout);
	}
	std::printf("%d of %zu criteria failed\n", failed, criteria.size());
	return failed == 0 ? 0 : 1;
}
