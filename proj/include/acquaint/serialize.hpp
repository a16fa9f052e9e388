#pragma once

#include "acquaint/balance.hpp"
#include "acquaint/engine.hpp"
#include "acquaint/harness.hpp"
#include "acquaint/spectral.hpp"
#include "json.hpp"

namespace acquaint {

// Trajectory arrays are included only when `trace` is set.
nlohmann::json to_json(const TrialResult& r, bool trace = false);
nlohmann::json to_json(const BalanceReport& r);
nlohmann::json to_json(const SpectralSummary& s);
nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const PointSummary& s);

// Flat "key value" lines for the spectral report.
std::string to_key_value(const SpectralSummary& s);

}  // namespace acquaint
