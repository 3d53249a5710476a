#include "eba/domain.hpp"

#include "eba/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>
#include <variant>

namespace eba {

namespace {

constexpr std::string_view kBaseHeader =
    "id,date,col_lat,col_lng,del_lat,del_lng,load_size,cost_eur,revenue_eur,direction";
constexpr std::string_view kCountryColumns = ",col_country,del_country";

std::vector<std::string_view> split(std::string_view line, char sep) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	while (true) {
		const auto pos = line.find(sep, start);
		if (pos == std::string_view::npos) {
			out.push_back(line.substr(start));
			return out;
		}
		out.push_back(line.substr(start, pos - start));
		start = pos + 1;
	}
}

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
		s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
		s.remove_suffix(1);
	return s;
}

std::optional<double> parse_double(std::string_view s) {
	double v = 0.0;
	if (!s.empty() && s.front() == '+')
		s.remove_prefix(1);
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
		return std::nullopt;
	return v;
}

void append_double(std::string &out, double v) {
	char buf[32];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
	out.append(buf, ptr);
}

// Validates one data row; returns a rejection reason or the record.
std::variant<JobRecord, std::string> parse_row(std::span<const std::string_view> f, bool with_countries,
                                               std::chrono::year_month_day datum) {
	JobRecord job;

	const auto id_text = trim(f[0]);
	if (id_text.empty())
		return std::string("missing id");
	{
		const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), job.id);
		if (ec != std::errc{} || ptr != id_text.data() + id_text.size())
			return std::string("invalid id");
	}

	const auto date_text = trim(f[1]);
	if (date_text.empty())
		return std::string("missing date");
	const auto day = parse_iso_date(date_text, datum);
	if (!day)
		return std::string("invalid date");
	job.date = *day;

	struct Coord {
		double *target;
		const char *name;
		bool latitude;
	};
	const Coord coords[] = {{&job.collection.lat, "collection latitude", true},
	                        {&job.collection.lng, "collection longitude", false},
	                        {&job.delivery.lat, "delivery latitude", true},
	                        {&job.delivery.lng, "delivery longitude", false}};
	for (std::size_t i = 0; i < 4; ++i) {
		const auto text = trim(f[2 + i]);
		if (text.empty())
			return std::string("missing ") + coords[i].name;
		const auto v = parse_double(text);
		if (!v)
			return std::string("invalid ") + coords[i].name;
		const double bound = coords[i].latitude ? 90.0 : 180.0;
		if (std::abs(*v) > bound)
			return std::string(coords[i].latitude ? "latitude out of range" : "longitude out of range");
		*coords[i].target = *v;
	}

	const auto load_text = trim(f[6]);
	if (load_text.empty())
		return std::string("missing load size");
	const auto load = parse_double(load_text);
	if (!load)
		return std::string("invalid load size");
	if (*load < kMinLoadSize)
		return std::string("load size out of range");
	job.load_size = *load;

	const auto cost_text = trim(f[7]);
	if (cost_text.empty())
		return std::string("missing cost");
	const auto cost = parse_double(cost_text);
	if (!cost)
		return std::string("invalid cost");
	if (*cost <= 0.0)
		return std::string("non-positive cost");
	job.cost_eur = *cost;

	const auto revenue_text = trim(f[8]);
	if (!revenue_text.empty()) {
		const auto revenue = parse_double(revenue_text);
		if (!revenue)
			return std::string("invalid revenue");
		if (*revenue < 0.0)
			return std::string("negative revenue");
		job.revenue_eur = *revenue;
	}

	const auto dir = parse_direction(trim(f[9]));
	if (!dir)
		return std::string("invalid direction");
	job.direction = *dir;

	if (with_countries) {
		job.col_country = std::string(trim(f[10]));
		job.del_country = std::string(trim(f[11]));
	}
	return job;
}

} // namespace

bool GeoPoint::valid() const noexcept {
	return std::isfinite(lat) && std::isfinite(lng) && std::abs(lat) <= 90.0 && std::abs(lng) <= 180.0;
}

std::string_view to_string(Direction d) noexcept {
	switch (d) {
	case Direction::import_:
		return "import";
	case Direction::export_:
		return "export";
	case Direction::domestic:
		return "domestic";
	}
	return "export";
}

std::optional<Direction> parse_direction(std::string_view s) noexcept {
	if (s == "import")
		return Direction::import_;
	if (s == "export")
		return Direction::export_;
	if (s == "domestic")
		return Direction::domestic;
	return std::nullopt;
}

Dataset::Dataset(std::vector<JobRecord> jobs, std::chrono::year_month_day datum)
    : jobs_(std::move(jobs)), datum_(datum) {
	std::sort(jobs_.begin(), jobs_.end(), [](const JobRecord &a, const JobRecord &b) { return a.id < b.id; });
	const auto dup = std::adjacent_find(jobs_.begin(), jobs_.end(),
	                                    [](const JobRecord &a, const JobRecord &b) { return a.id == b.id; });
	if (dup != jobs_.end())
		throw std::invalid_argument("duplicate job id " + std::to_string(dup->id));
}

const JobRecord &Dataset::at(JobId id) const {
	const auto it = std::lower_bound(jobs_.begin(), jobs_.end(), id,
	                                 [](const JobRecord &j, JobId v) { return j.id < v; });
	if (it == jobs_.end() || it->id != id)
		throw std::out_of_range("unknown job id " + std::to_string(id));
	return *it;
}

std::vector<JobRecord> Dataset::select(std::span<const JobId> ids) const {
	std::vector<JobRecord> out;
	out.reserve(ids.size());
	for (const auto id : ids)
		out.push_back(at(id));
	return out;
}

std::optional<Day> parse_iso_date(std::string_view s, std::chrono::year_month_day datum) {
	using namespace std::chrono;
	if (s.size() != 10 || s[4] != '-' || s[7] != '-')
		return std::nullopt;
	int y = 0;
	unsigned m = 0, d = 0;
	const auto num = [&](std::string_view part, auto &out) {
		const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
		return ec == std::errc{} && ptr == part.data() + part.size();
	};
	if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d))
		return std::nullopt;
	const year_month_day ymd{year{y}, month{m}, day{d}};
	if (!ymd.ok())
		return std::nullopt;
	return (sys_days{ymd} - sys_days{datum}).count();
}

std::string format_iso_date(Day d, std::chrono::year_month_day datum) {
	using namespace std::chrono;
	const year_month_day ymd{sys_days{datum} + days{d}};
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
	return buf;
}

ParseResult parse_jobs_csv(std::string_view text, std::chrono::year_month_day datum) {
	if (text.substr(0, 3) == "\xEF\xBB\xBF")
		text.remove_prefix(3);

	auto lines = split(text, '\n');
	if (lines.empty() || trim(lines.front()).empty())
		throw FatalInputError("missing CSV header");

	const auto header = trim(lines.front());
	bool with_countries = false;
	if (header == kBaseHeader) {
		with_countries = false;
	} else if (header.size() == kBaseHeader.size() + kCountryColumns.size() && header.starts_with(kBaseHeader) &&
	           header.ends_with(kCountryColumns)) {
		with_countries = true;
	} else {
		throw FatalInputError("malformed CSV header: expected '" + std::string(kBaseHeader) + "'");
	}
	const std::size_t n_fields = with_countries ? 12 : 10;

	ParseResult result;
	std::vector<JobRecord> jobs;
	std::unordered_set<JobId> seen;
	for (std::size_t i = 1; i < lines.size(); ++i) {
		const auto line = trim(lines[i]);
		if (line.empty())
			continue;
		const std::size_t row = i + 1;
		const auto fields = split(line, ',');
		if (fields.size() != n_fields) {
			result.rejections.push_back({row, "wrong field count"});
			continue;
		}
		auto parsed = parse_row(fields, with_countries, datum);
		if (auto *reason = std::get_if<std::string>(&parsed)) {
			result.rejections.push_back({row, std::move(*reason)});
			continue;
		}
		auto &job = std::get<JobRecord>(parsed);
		if (!seen.insert(job.id).second) {
			result.rejections.push_back({row, "duplicate id"});
			continue;
		}
		jobs.push_back(std::move(job));
	}
	result.dataset = Dataset(std::move(jobs), datum);
	return result;
}

ParseResult read_jobs_csv(const std::string &path, std::chrono::year_month_day datum) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw FatalInputError("cannot read " + path);
	std::ostringstream buf;
	buf << in.rdbuf();
	if (in.bad())
		throw FatalInputError("error reading " + path);
	return parse_jobs_csv(buf.str(), datum);
}

std::string serialize_jobs_csv(const Dataset &dataset) {
	const auto jobs = dataset.jobs();
	const bool with_countries = std::any_of(jobs.begin(), jobs.end(), [](const JobRecord &j) {
		return !j.col_country.empty() || !j.del_country.empty();
	});

	std::string out(kBaseHeader);
	if (with_countries)
		out += kCountryColumns;
	out += '\n';
	for (const auto &j : jobs) {
		out += std::to_string(j.id);
		out += ',';
		out += format_iso_date(j.date, dataset.datum());
		for (const double v : {j.collection.lat, j.collection.lng, j.delivery.lat, j.delivery.lng, j.load_size,
		                       j.cost_eur}) {
			out += ',';
			append_double(out, v);
		}
		out += ',';
		if (j.revenue_eur)
			append_double(out, *j.revenue_eur);
		out += ',';
		out += to_string(j.direction);
		if (with_countries) {
			out += ',';
			out += j.col_country;
			out += ',';
			out += j.del_country;
		}
		out += '\n';
	}
	return out;
}

std::string rejection_json_line(const Rejection &r) {
	return nlohmann::ordered_json{{"row", r.row}, {"reason", r.reason}}.dump();
}

std::optional<LoadUnit> parse_load_unit(std::string_view s) noexcept {
	if (s == "standard_pallet")
		return LoadUnit::standard_pallet;
	if (s == "euro_pallet")
		return LoadUnit::euro_pallet;
	if (s == "loading_meter")
		return LoadUnit::loading_meter;
	if (s == "kg")
		return LoadUnit::kg;
	if (s == "container")
		return LoadUnit::container;
	return std::nullopt;
}

double code_load_size(double quantity, LoadUnit unit) {
	if (!(quantity > 0.0) || !std::isfinite(quantity))
		throw std::invalid_argument("uncodable load");
	// Units per standard container.
	double capacity = 1.0;
	switch (unit) {
	case LoadUnit::standard_pallet:
		capacity = 26.0;
		break;
	case LoadUnit::euro_pallet:
		capacity = 33.0;
		break;
	case LoadUnit::loading_meter:
		capacity = 13.6;
		break;
	case LoadUnit::kg:
		capacity = 24000.0;
		break;
	case LoadUnit::container:
		capacity = 1.0;
		break;
	}
	return std::max(quantity / capacity, kMinLoadSize);
}

double code_load_size(double quantity, std::string_view unit) {
	const auto u = parse_load_unit(unit);
	if (!u)
		throw std::invalid_argument("uncodable load: unknown unit '" + std::string(unit) + "'");
	return code_load_size(quantity, *u);
}

Segmentation segment(const Dataset &dataset, std::uint64_t seed, double historical_share) {
	const std::size_t n = dataset.size();
	if (n < 3)
		throw std::invalid_argument("segmentation needs at least 3 jobs");
	if (!(historical_share >= 0.0 && historical_share <= 1.0))
		throw std::invalid_argument("historical_share must lie in [0, 1]");

	std::vector<const JobRecord *> by_date;
	by_date.reserve(n);
	for (const auto &j : dataset.jobs())
		by_date.push_back(&j);
	std::sort(by_date.begin(), by_date.end(), [](const JobRecord *a, const JobRecord *b) {
		return a->date != b->date ? a->date < b->date : a->id < b->id;
	});

	const std::size_t n_test = (n + 2) / 3;
	const std::size_t n_rest = n - n_test;

	Segmentation seg;
	for (std::size_t i = n_rest; i < n; ++i)
		seg.test.push_back(by_date[i]->id);

	std::vector<JobId> rest;
	rest.reserve(n_rest);
	for (std::size_t i = 0; i < n_rest; ++i)
		rest.push_back(by_date[i]->id);
	std::sort(rest.begin(), rest.end());

	Rng rng(seed);
	for (std::size_t i = rest.size(); i > 1; --i)
		std::swap(rest[i - 1], rest[rng.index(i)]);

	const auto n_hist = static_cast<std::size_t>(std::llround(historical_share * static_cast<double>(n_rest)));
	seg.historical.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_hist));
	seg.training.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_hist), rest.end());

	std::sort(seg.test.begin(), seg.test.end());
	std::sort(seg.historical.begin(), seg.historical.end());
	std::sort(seg.training.begin(), seg.training.end());
	return seg;
}

} // namespace eba
