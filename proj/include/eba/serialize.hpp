#pragma once

#include "eba/backtest.hpp"
#include "eba/economics.hpp"
#include "eba/regression.hpp"
#include "eba/synth.hpp"
#include "eba/training.hpp"

#include <nlohmann/json.hpp>
#include <string>

namespace eba {

using nlohmann::json;

void to_json(json &j, const AttributeWeights &w);  // [x1, x2, x3, x4]
void from_json(const json &j, AttributeWeights &w);

void to_json(json &j, const Segmentation &s);
void from_json(const json &j, Segmentation &s);

void to_json(json &j, const TrainedModel &m);
void from_json(const json &j, TrainedModel &m);

void to_json(json &j, const SimplexOptions<double> &o);
void from_json(const json &j, SimplexOptions<double> &o);

void to_json(json &j, const TrialReport &r);
void to_json(json &j, const Comparison &c);
void to_json(json &j, const LinearModel &m);
void to_json(json &j, const ManualErrorProfile &p);
void to_json(json &j, const IndifferenceResult &r);
void to_json(json &j, const SweepGrid &g);

void to_json(json &j, const Lane &l);
void from_json(const json &j, Lane &l);
void to_json(json &j, const SyntheticSpec &s);
void from_json(const json &j, SyntheticSpec &s);

/// Per-job rows of a trial: id,date,load_size,estimate,actual,error_eur,error_pct,ape,pool_size,...
std::string trial_rows_csv(const TrialReport &r, std::chrono::year_month_day datum);
std::string weekly_series_csv(const WeeklySeries &w);
/// Rows are bidder counts, columns are margins.
std::string sweep_grid_csv(const SweepGrid &g);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const json &j);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

} // namespace eba

namespace eba::stats {

void to_json(nlohmann::json &j, const Summary &s);
void to_json(nlohmann::json &j, const ErrorStats &s);
void to_json(nlohmann::json &j, const SlopeTest &s);
void to_json(nlohmann::json &j, const TTest &t);

} // namespace eba::stats
