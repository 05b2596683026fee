#pragma once

#include <json.hpp>

#include "densenorm/metrics.hpp"
#include "densenorm/moments.hpp"
#include "densenorm/pipeline.hpp"

namespace densenorm {

// Moment table debug dump: {"(c,r)": {"mean": [...], "std": [...]}, ...}.
nlohmann::json table_to_json(const MomentTable& table);
MomentTable table_from_json(const nlohmann::json& j, const GridSpec& grid);

// Machine-readable reports; every object carries "schema": 1.
nlohmann::json pass_report_to_json(const PassReport& report);
nlohmann::json seam_report_to_json(const SeamReport& report);
nlohmann::json bench_report_to_json(const BenchReport& report);
nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows);

}  // namespace densenorm
