#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "sfl/config.hpp"
#include "sfl/core.hpp"
#include "sfl/flow.hpp"

namespace sfl {

using Json = nlohmann::json;

// Matrix schema: {"dim": n, "entries": [[ [re,im], ... ] ...]} row-major;
// real entries may be bare numbers.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json triple_to_json(const Triple& t);
Triple triple_from_json(const Json& j);

Json path_to_json(const OperatorPath& p);
OperatorPath path_from_json(const Json& j);

Json flow_report_to_json(const FlowReport& rep);

void apply_config_json(Config& cfg, const Json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace sfl
