#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace eba {

/// Nelder-Mead settings. Defaults are the classic 1965 coefficients.
template <typename Scalar = double>
struct SimplexOptions {
	int max_iterations = 2500;
	Scalar x_tolerance = Scalar(1e-8); ///< max |x_i - x_best| over the simplex
	Scalar f_tolerance = Scalar(1e-8); ///< max |f_i - f_best| over the simplex
	Scalar reflection = Scalar(1);
	Scalar expansion = Scalar(2);
	Scalar contraction = Scalar(0.5);
	Scalar shrink = Scalar(0.5);

	void validate() const {
		if (max_iterations < 1)
			throw std::invalid_argument("max_iterations must be at least 1");
		if (!(x_tolerance > 0) || !(f_tolerance > 0))
			throw std::invalid_argument("simplex tolerances must be positive");
		if (!(reflection > 0) || !(expansion > 1) || !(contraction > 0 && contraction < 1) ||
		    !(shrink > 0 && shrink < 1))
			throw std::invalid_argument("invalid simplex coefficients");
	}
};

template <typename Scalar = double>
struct SimplexResult {
	using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

	Vector x;
	Scalar f = std::numeric_limits<Scalar>::infinity();
	int iterations = 0;
	int evaluations = 0;
	bool converged = false;
	/// Best objective value after each completed iteration.
	std::vector<Scalar> best_trace;
};

namespace detail {

template <typename Scalar, typename F>
Scalar evaluate_checked(F &f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x, int &evaluations) {
	const Scalar v = static_cast<Scalar>(f(x));
	++evaluations;
	if (std::isnan(v) || v == -std::numeric_limits<Scalar>::infinity())
		throw std::domain_error("objective returned a non-finite value");
	return v;
}

} // namespace detail

/// Downhill-simplex minimization of `f` starting at `x0`.
///
/// The initial simplex is x0 plus one vertex per coordinate, perturbed by 5% (or 0.00025 where
/// the coordinate is zero). `f` may return +infinity to mark points outside its domain; NaN or
/// -infinity throws std::domain_error. The returned point always satisfies f(x) <= f(x0).
/// Equal vertices keep their previous order, so runs are fully deterministic.
template <typename Scalar, typename F>
SimplexResult<Scalar> minimize(F &&f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x0,
                               const SimplexOptions<Scalar> &opts = {}) {
	using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
	opts.validate();
	const Eigen::Index n = x0.size();
	if (n < 1)
		throw std::invalid_argument("minimize needs at least one dimension");

	SimplexResult<Scalar> out;
	std::vector<Vector> sim(static_cast<std::size_t>(n + 1), x0);
	std::vector<Scalar> fv(static_cast<std::size_t>(n + 1));
	for (Eigen::Index k = 0; k < n; ++k) {
		auto &v = sim[static_cast<std::size_t>(k + 1)];
		v[k] = v[k] != Scalar(0) ? Scalar(1.05) * v[k] : Scalar(0.00025);
	}
	for (std::size_t i = 0; i < sim.size(); ++i)
		fv[i] = detail::evaluate_checked(f, sim[i], out.evaluations);

	std::vector<std::size_t> order(sim.size());
	const auto sort_vertices = [&] {
		std::iota(order.begin(), order.end(), std::size_t{0});
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
		std::vector<Vector> s2;
		std::vector<Scalar> f2;
		s2.reserve(sim.size());
		f2.reserve(sim.size());
		for (const auto i : order) {
			s2.push_back(std::move(sim[i]));
			f2.push_back(fv[i]);
		}
		sim = std::move(s2);
		fv = std::move(f2);
	};
	const auto spread_ok = [&] {
		Scalar xs = 0, fs = 0;
		for (std::size_t i = 1; i < sim.size(); ++i) {
			xs = std::max(xs, (sim[i] - sim[0]).cwiseAbs().maxCoeff());
			const Scalar df = std::abs(fv[i] - fv[0]);
			if (std::isnan(df))
				return false;
			fs = std::max(fs, df);
		}
		return xs <= opts.x_tolerance && fs <= opts.f_tolerance;
	};

	sort_vertices();
	const std::size_t worst = static_cast<std::size_t>(n);
	const Scalar rho = opts.reflection, chi = opts.expansion, psi = opts.contraction, sigma = opts.shrink;

	while (true) {
		if (spread_ok()) {
			out.converged = true;
			break;
		}
		if (out.iterations >= opts.max_iterations)
			break;

		Vector centroid = Vector::Zero(n);
		for (std::size_t i = 0; i < worst; ++i)
			centroid += sim[i];
		centroid /= static_cast<Scalar>(n);

		const Vector xr = (Scalar(1) + rho) * centroid - rho * sim[worst];
		const Scalar fr = detail::evaluate_checked(f, xr, out.evaluations);
		bool do_shrink = false;

		if (fr < fv[0]) {
			const Vector xe = (Scalar(1) + rho * chi) * centroid - rho * chi * sim[worst];
			const Scalar fe = detail::evaluate_checked(f, xe, out.evaluations);
			if (fe < fr) {
				sim[worst] = xe;
				fv[worst] = fe;
			} else {
				sim[worst] = xr;
				fv[worst] = fr;
			}
		} else if (fr < fv[worst - 1]) {
			sim[worst] = xr;
			fv[worst] = fr;
		} else if (fr < fv[worst]) {
			const Vector xc = (Scalar(1) + psi * rho) * centroid - psi * rho * sim[worst];
			const Scalar fc = detail::evaluate_checked(f, xc, out.evaluations);
			if (fc <= fr) {
				sim[worst] = xc;
				fv[worst] = fc;
			} else {
				do_shrink = true;
			}
		} else {
			const Vector xcc = (Scalar(1) - psi) * centroid + psi * sim[worst];
			const Scalar fcc = detail::evaluate_checked(f, xcc, out.evaluations);
			if (fcc < fv[worst]) {
				sim[worst] = xcc;
				fv[worst] = fcc;
			} else {
				do_shrink = true;
			}
		}

		if (do_shrink) {
			for (std::size_t j = 1; j < sim.size(); ++j) {
				sim[j] = sim[0] + sigma * (sim[j] - sim[0]);
				fv[j] = detail::evaluate_checked(f, sim[j], out.evaluations);
			}
		}

		sort_vertices();
		++out.iterations;
		out.best_trace.push_back(fv[0]);
	}

	out.x = sim[0];
	out.f = fv[0];
	return out;
}

} // namespace eba
