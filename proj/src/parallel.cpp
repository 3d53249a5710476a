#include "eba/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace eba {

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t, std::size_t)> &body) {
	if (n == 0)
		return;
	const std::size_t chunks = std::clamp<std::size_t>(workers, 1, n);
	if (chunks == 1) {
		body(0, n);
		return;
	}
	std::vector<std::exception_ptr> errors(chunks);
	{
		std::vector<std::jthread> threads;
		threads.reserve(chunks);
		for (std::size_t c = 0; c < chunks; ++c) {
			const std::size_t begin = n * c / chunks;
			const std::size_t end = n * (c + 1) / chunks;
			threads.emplace_back([&, c, begin, end] {
				try {
					body(begin, end);
				} catch (...) {
					errors[c] = std::current_exception();
				}
			});
		}
	}
	for (const auto &e : errors)
		if (e)
			std::rethrow_exception(e);
}

} // namespace eba
