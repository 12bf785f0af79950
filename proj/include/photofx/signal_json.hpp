#pragma once

#include "photofx/signals.hpp"

#include <json.hpp>

namespace photofx {

// JSON forms shared by signal files, pair records and the CLI.
nlohmann::json to_json_value(const PhotoSignal& signal, const std::optional<TrajSignal>& trajectory = std::nullopt);
ControlSignals control_signals_from_json(const nlohmann::json& doc);

nlohmann::json to_json_value(const TrajSignal& signal);
TrajSignal traj_from_json(const nlohmann::json& rows, const std::string& where = "trajectory");

}  // namespace photofx
