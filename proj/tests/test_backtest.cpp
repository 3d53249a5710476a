#include "eba/backtest.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

using namespace eba;
using testing::make_job;

namespace {

struct Fixture {
	Dataset dataset;
	Segmentation seg;
};

Fixture random_fixture(std::size_t n, std::uint64_t seed) {
	Fixture f{Dataset(testing::random_jobs(n, seed)), {}};
	f.seg = segment(f.dataset, seed);
	return f;
}

TrialReport shifted(TrialReport r, double ape_shift) {
	for (auto &row : r.rows)
		row.ape += ape_shift;
	return r;
}

} // namespace

TEST_SUITE("backtest") {

TEST_CASE("an exact duplicate older than the lag is estimated perfectly") {
	const auto old_job = make_job(1, 100, {53.3, -6.2}, {51.5, -0.1}, 0.4, 640);
	auto probe = old_job;
	probe.id = 2;
	probe.date = 131;
	Fixture f{Dataset({old_job, probe}), {}};
	f.seg.historical = {1};
	f.seg.test = {2};
	TrialConfig cfg;
	cfg.k = 3;
	const auto r = run_trial(f.seg, f.dataset, cfg);
	REQUIRE(r.rows.size() == 1);
	CHECK(r.rows[0].ape == 0.0);
	CHECK(r.rows[0].estimate == 640.0);
	CHECK(r.rows[0].underfilled);
	CHECK(r.rows[0].neighbors == std::vector<JobId>{1});
}

TEST_CASE("jobs inside the lag window are invisible") {
	const auto old_job = make_job(1, 100, {53.3, -6.2}, {51.5, -0.1}, 0.4, 640);
	auto probe = old_job;
	probe.id = 2;
	probe.date = 110;
	Fixture f{Dataset({old_job, probe}), {}};
	f.seg.training = {1};
	f.seg.test = {2};
	const auto r = run_trial(f.seg, f.dataset, {});
	CHECK(r.rows.empty());
	REQUIRE(r.skipped.size() == 1);
	CHECK(r.skipped[0].id == 2);
	CHECK(r.skipped[0].reason == "no eligible history");

	f.seg.test.clear();
	CHECK_THROWS_AS(run_trial(f.seg, f.dataset, {}), std::invalid_argument);
}

TEST_CASE("neighbors always predate the probe by the lag") {
	const auto f = random_fixture(400, 11);
	for (const int lag : {0, 30, 90}) {
		TrialConfig cfg;
		cfg.lag_days = lag;
		const auto r = run_trial(f.seg, f.dataset, cfg);
		CHECK(r.rows.size() + r.skipped.size() == f.seg.test.size());
		const std::set<JobId> test_ids(f.seg.test.begin(), f.seg.test.end());
		for (const auto &row : r.rows) {
			for (const JobId n : row.neighbors) {
				CHECK(f.dataset.at(n).date <= row.date - lag);
				CHECK_FALSE(test_ids.contains(n));
			}
		}
		CHECK(std::is_sorted(r.rows.begin(), r.rows.end(), [](const TrialRow &a, const TrialRow &b) {
			return std::pair{a.date, a.id} < std::pair{b.date, b.id};
		}));
	}
}

TEST_CASE("estimated test jobs join the pool when asked") {
	const auto f = random_fixture(300, 13);
	TrialConfig cfg;
	cfg.include_estimated_test_jobs = true;
	cfg.lag_days = 0;
	const auto r = run_trial(f.seg, f.dataset, cfg);
	bool used_test_job = false;
	const std::set<JobId> test_ids(f.seg.test.begin(), f.seg.test.end());
	for (const auto &row : r.rows)
		for (const JobId n : row.neighbors) {
			const auto &nb = f.dataset.at(n);
			if (test_ids.contains(n)) {
				used_test_job = true;
				CHECK(std::pair{nb.date, nb.id} < std::pair{row.date, row.id});
			}
		}
	CHECK(used_test_job);
}

TEST_CASE("reported MAPE matches the rows") {
	const auto f = random_fixture(300, 17);
	TrialConfig cfg;
	cfg.weights = {0.3, 0.2, 0.001, 0.8};
	const auto r = run_trial(f.seg, f.dataset, cfg);
	REQUIRE_FALSE(r.rows.empty());
	double total = 0.0;
	for (const auto &row : r.rows) {
		total += row.ape;
		CHECK(row.ape == doctest::Approx(100.0 * std::abs(row.estimate - row.actual) / row.actual).epsilon(1e-12));
		CHECK(row.actual == f.dataset.at(row.id).cost_eur);
	}
	CHECK(r.overall.mape == doctest::Approx(total / static_cast<double>(r.rows.size())).epsilon(1e-12));
	CHECK(r.overall.n == r.rows.size());

	cfg.workers = 4;
	const auto parallel = run_trial(f.seg, f.dataset, cfg);
	REQUIRE(parallel.rows.size() == r.rows.size());
	for (std::size_t i = 0; i < r.rows.size(); ++i) {
		CHECK(parallel.rows[i].estimate == r.rows[i].estimate);
		CHECK(parallel.rows[i].neighbors == r.rows[i].neighbors);
	}
}

TEST_CASE("load-size classes") {
	std::vector<JobRecord> jobs;
	const std::array<double, 4> loads{0.03, 1.0 / 26.0, 0.49, 0.5};
	for (std::size_t i = 0; i < loads.size(); ++i) {
		jobs.push_back(make_job(10 + i, 0, {53.3, -6.2}, {51.5, -0.1}, loads[i], 1000 * loads[i]));
		jobs.push_back(make_job(20 + i, 100, {53.3, -6.2}, {51.5, -0.1}, loads[i], 1100 * loads[i]));
	}
	Fixture f{Dataset(jobs), {}};
	f.seg.historical = {10, 11, 12, 13};
	f.seg.test = {20, 21, 22, 23};
	TrialConfig cfg;
	cfg.k = 1;
	const auto r = run_trial(f.seg, f.dataset, cfg);
	REQUIRE(r.segments.load_size.size() == 3);
	CHECK(r.segments.load_size[0].n == 1);
	CHECK(r.segments.load_size[1].n == 2);
	CHECK(r.segments.load_size[2].n == 1);
	std::size_t total = 0;
	for (const auto &s : r.segments.load_size)
		total += s.n;
	CHECK(total == r.rows.size());
}

TEST_CASE("regions") {
	CHECK(region_of("IE", {}) == Region::ireland);
	CHECK(region_of("GB", {}) == Region::united_kingdom);
	CHECK(region_of("DE", {}) == Region::other_eu);
	CHECK(region_of("NO", {}) == Region::other_europe);
	CHECK(region_of("CN", {}) == Region::rest_of_world);
	CHECK(region_of("grid:10:-2", {53.3, -6.2}) == Region::ireland);
	CHECK(region_of("grid:10:0", {51.5, -0.1}) == Region::united_kingdom);
	CHECK(region_of("grid:6:24", {31.2, 121.5}) == Region::rest_of_world);
}

TEST_CASE("weekly series flags extreme weeks") {
	TrialReport r;
	for (JobId id = 1; id <= 40; ++id) {
		TrialRow row;
		row.id = id;
		row.date = static_cast<Day>(id) * 2;
		row.ape = id == 17 ? 5000.0 : 10.0 + static_cast<double>(id % 5);
		r.rows.push_back(row);
	}
	const auto s = weekly_mape_series(r);
	CHECK(s.outliers == std::vector<JobId>{17});
	std::size_t n = 0;
	for (const auto &p : s.points) {
		CHECK(p.n > 0);
		n += p.n;
	}
	CHECK(n == r.rows.size());
	CHECK(s.points.front().week == 0);
	CHECK(weekly_mape_series(TrialReport{}).points.empty());
}

TEST_CASE("comparing reports") {
	const auto f = random_fixture(300, 23);
	TrialConfig cfg;
	cfg.weights = {0.5, 0.5, 0.002, 0.7};
	const auto trained = run_trial(f.seg, f.dataset, cfg);

	const auto same = compare_reports(trained, trained, stats::Sided::two);
	CHECK(same.test.p == 1.0);
	CHECK_FALSE(same.reject);
	CHECK(same.n == trained.rows.size());

	const auto worse = compare_reports(trained, shifted(trained, 10.0));
	CHECK(worse.reject);
	CHECK(worse.test.p < 0.05);
	CHECK(worse.mape_untrained == doctest::Approx(worse.mape_trained + 10.0).epsilon(1e-12));

	auto missing = trained;
	missing.rows.pop_back();
	CHECK_THROWS_AS(compare_reports(trained, missing), std::invalid_argument);
}

TEST_CASE("comparison of a toy pair matches scipy") {
	const std::array<double, 6> untrained_ape{23.1, 40.2, 18.7, 55.0, 31.4, 27.9};
	const std::array<double, 6> trained_ape{20.5, 35.1, 19.9, 47.3, 30.2, 22.8};
	TrialReport trained, untrained;
	for (std::size_t i = 0; i < 6; ++i) {
		TrialRow row;
		row.id = i + 1;
		row.ape = trained_ape[i];
		trained.rows.push_back(row);
		row.ape = untrained_ape[i];
		untrained.rows.push_back(row);
	}
	const auto one = compare_reports(trained, untrained);
	CHECK(one.test.t == doctest::Approx(2.6228218831770644).epsilon(1e-10));
	CHECK(one.test.p == doctest::Approx(0.023468854734489546).epsilon(1e-8));
	CHECK(one.reject);
	const auto two = compare_reports(trained, untrained, stats::Sided::two);
	CHECK(two.test.p == doctest::Approx(0.04693770946897909).epsilon(1e-8));
}

TEST_CASE("trend test") {
	TrialReport r;
	for (JobId id = 1; id <= 30; ++id) {
		TrialRow row;
		row.id = id;
		row.date = static_cast<Day>(id) * 3;
		row.ape = 5.0 + 0.5 * static_cast<double>(row.date);
		r.rows.push_back(row);
	}
	const auto up = trend_test(r);
	CHECK(up.slope == doctest::Approx(0.5).epsilon(1e-12));
	CHECK(up.reject);
	for (auto &row : r.rows)
		row.ape = 7.0;
	const auto flat = trend_test(r);
	CHECK(flat.slope == 0.0);
	CHECK_FALSE(flat.reject);
}

} // TEST_SUITE
