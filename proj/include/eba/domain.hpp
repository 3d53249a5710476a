#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eba {

/// Raised for input that cannot be processed at all (bad header, unreadable stream).
class FatalInputError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

using JobId = std::uint64_t;

/// Days since the dataset datum.
using Day = std::int64_t;

struct GeoPoint {
	double lat = 0.0; ///< degrees, [-90, 90]
	double lng = 0.0; ///< degrees, [-180, 180]

	bool valid() const noexcept;
	friend bool operator==(const GeoPoint &, const GeoPoint &) = default;
};

enum class Direction { import_, export_, domestic };

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> parse_direction(std::string_view s) noexcept;

/// Smallest load a record may carry, as a fraction of one container.
inline constexpr double kMinLoadSize = 0.001;

struct JobRecord {
	JobId id = 0;
	Day date = 0;
	GeoPoint collection;
	GeoPoint delivery;
	double load_size = 1.0; ///< fraction of one standard container
	double cost_eur = 0.0;
	std::optional<double> revenue_eur;
	Direction direction = Direction::export_;
	// Optional country labels (ISO 3166 alpha-2 by convention). Empty when unknown.
	std::string col_country;
	std::string del_country;

	friend bool operator==(const JobRecord &, const JobRecord &) = default;
};

/// Cost per container-equivalent (EUR / container).
inline double normalized_cost(const JobRecord &job) {
	return job.cost_eur / job.load_size;
}

/// Immutable-after-construction collection of jobs kept in ascending id order.
class Dataset {
public:
	static constexpr std::chrono::year_month_day kDefaultDatum{std::chrono::year{2000}, std::chrono::month{1},
	                                                           std::chrono::day{1}};

	Dataset() = default;
	/// Sorts by id; throws std::invalid_argument on duplicate ids.
	explicit Dataset(std::vector<JobRecord> jobs, std::chrono::year_month_day datum = kDefaultDatum);

	std::span<const JobRecord> jobs() const noexcept { return jobs_; }
	std::size_t size() const noexcept { return jobs_.size(); }
	bool empty() const noexcept { return jobs_.empty(); }
	std::chrono::year_month_day datum() const noexcept { return datum_; }

	/// Throws std::out_of_range for unknown ids.
	const JobRecord &at(JobId id) const;
	std::vector<JobRecord> select(std::span<const JobId> ids) const;

private:
	std::vector<JobRecord> jobs_;
	std::chrono::year_month_day datum_ = kDefaultDatum;
};

struct Rejection {
	std::size_t row = 0; ///< 1-based line number in the input file (header is line 1)
	std::string reason;
};

struct ParseResult {
	Dataset dataset;
	std::vector<Rejection> rejections;
};

/// Parses the job CSV. Bad rows are reported, never fatal; a malformed header throws FatalInputError.
ParseResult parse_jobs_csv(std::string_view text,
                           std::chrono::year_month_day datum = Dataset::kDefaultDatum);
ParseResult read_jobs_csv(const std::string &path,
                          std::chrono::year_month_day datum = Dataset::kDefaultDatum);

std::string serialize_jobs_csv(const Dataset &dataset);
std::string rejection_json_line(const Rejection &r);

std::optional<Day> parse_iso_date(std::string_view s, std::chrono::year_month_day datum);
std::string format_iso_date(Day day, std::chrono::year_month_day datum);

enum class LoadUnit { standard_pallet, euro_pallet, loading_meter, kg, container };

std::optional<LoadUnit> parse_load_unit(std::string_view s) noexcept;

/// Converts a quoted quantity to a fraction of one container, floored at kMinLoadSize.
/// Throws std::invalid_argument("uncodable load") for non-positive or non-finite quantities.
double code_load_size(double quantity, LoadUnit unit);
/// Same, for a unit given by name; unknown names throw std::invalid_argument.
double code_load_size(double quantity, std::string_view unit);

struct Segmentation {
	std::vector<JobId> test;
	std::vector<JobId> historical;
	std::vector<JobId> training;

	friend bool operator==(const Segmentation &, const Segmentation &) = default;
};

/// Most recent third (by date, then id) becomes the test set; the rest is shuffled by `seed`
/// and split so round(historical_share * remainder) jobs are historical. Id lists are sorted.
Segmentation segment(const Dataset &dataset, std::uint64_t seed, double historical_share = 0.6);

} // namespace eba
