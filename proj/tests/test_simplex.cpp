#include "eba/simplex.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace eba;
using Vec = Eigen::VectorXd;

namespace {

double rosenbrock(const Vec &x) {
	return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
}

bool non_increasing(const std::vector<double> &trace) {
	for (std::size_t i = 1; i < trace.size(); ++i)
		if (trace[i] > trace[i - 1])
			return false;
	return true;
}

} // namespace

TEST_SUITE("simplex") {

TEST_CASE("sphere") {
	const auto r = minimize([](const Vec &x) { return x.squaredNorm(); }, Vec(Vec::Ones(2)));
	CHECK(r.converged);
	CHECK(r.f < 1e-10);
	CHECK(r.x.norm() < 1e-6);
	CHECK(non_increasing(r.best_trace));

	Vec x0(4);
	x0 << 1.0, -2.0, 0.5, 3.0;
	const auto r4 = minimize([](const Vec &x) { return x.squaredNorm(); }, x0);
	CHECK(r4.f < 1e-10);
	CHECK(non_increasing(r4.best_trace));
}

TEST_CASE("rosenbrock from the classic start") {
	Vec x0(2);
	x0 << -1.2, 1.0;
	const auto r = minimize(rosenbrock, x0);
	CHECK(r.converged);
	CHECK(r.iterations <= 500);
	CHECK(std::abs(r.x[0] - 1) < 1e-4);
	CHECK(std::abs(r.x[1] - 1) < 1e-4);
	CHECK(non_increasing(r.best_trace));
	CHECK(static_cast<int>(r.best_trace.size()) == r.iterations);
}

TEST_CASE("constant objective returns the start point") {
	Vec x0(3);
	x0 << 0.2, 0.0, 7.0;
	const auto r = minimize([](const Vec &) { return 4.0; }, x0);
	CHECK(r.converged);
	CHECK(r.x == x0);
	CHECK(r.f == 4.0);
}

TEST_CASE("result never worse than the start, even when capped") {
	SimplexOptions<double> opts;
	opts.max_iterations = 3;
	Vec x0(2);
	x0 << -1.2, 1.0;
	const auto r = minimize(rosenbrock, x0, opts);
	CHECK_FALSE(r.converged);
	CHECK(r.iterations == 3);
	CHECK(r.f <= rosenbrock(x0));
}

TEST_CASE("infinity marks an infeasible region") {
	const auto f = [](const Vec &x) {
		return x[0] < 0.5 ? std::numeric_limits<double>::infinity() : (x[0] - 1) * (x[0] - 1);
	};
	const auto r = minimize(f, Vec(Vec::Constant(1, 3.0)));
	CHECK(std::abs(r.x[0] - 1) < 1e-4);
	const auto nan = [](const Vec &) { return std::nan(""); };
	CHECK_THROWS_AS(minimize(nan, Vec(Vec::Ones(2))), std::domain_error);
}

TEST_CASE("runs are bit-identical") {
	Vec x0(2);
	x0 << -1.2, 1.0;
	const auto a = minimize(rosenbrock, x0);
	const auto b = minimize(rosenbrock, x0);
	CHECK(a.x == b.x);
	CHECK(a.best_trace == b.best_trace);
	CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("single precision instantiation") {
	Eigen::VectorXf x0 = Eigen::VectorXf::Ones(2);
	SimplexOptions<float> opts;
	opts.x_tolerance = 1e-4f;
	opts.f_tolerance = 1e-6f;
	const auto r = minimize([](const Eigen::VectorXf &x) { return x.squaredNorm(); }, x0, opts);
	CHECK(r.converged);
	CHECK(r.f < 1e-6f);
}

TEST_CASE("options are validated") {
	SimplexOptions<double> opts;
	opts.expansion = 1.0;
	CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
	opts = {};
	opts.max_iterations = 0;
	CHECK_THROWS_AS(minimize([](const Vec &x) { return x[0]; }, Vec(Vec::Ones(1)), opts), std::invalid_argument);
	CHECK_THROWS_AS(minimize([](const Vec &x) { return x.sum(); }, Vec(0)), std::invalid_argument);
}

} // TEST_SUITE
