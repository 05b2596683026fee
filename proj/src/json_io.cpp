#include "densenorm/json_io.hpp"

#include <cstdio>

namespace densenorm {

using nlohmann::json;

nlohmann::json table_to_json(const MomentTable& table) {
    json j = json::object();
    const GridSpec& grid = table.grid();
    for (int r = 0; r < grid.cols; ++r) {
        for (int c = 0; c < grid.rows; ++c) {
            const PatchCoord coord{c, r};
            if (!table.contains(coord)) continue;
            const ChannelMoments& m = table.at(coord);
            const std::string key = "(" + std::to_string(c) + "," + std::to_string(r) + ")";
            j[key] = json{{"mean", m.mean}, {"std", m.stddev}};
        }
    }
    return j;
}

MomentTable table_from_json(const nlohmann::json& j, const GridSpec& grid) {
    MomentTable table(grid);
    for (const auto& [key, value] : j.items()) {
        int c = 0, r = 0;
        if (std::sscanf(key.c_str(), "(%d,%d)", &c, &r) != 2)
            throw Error(Errc::decode_error, "bad moment table key '" + key + "'");
        ChannelMoments m;
        m.mean = value.at("mean").get<std::vector<double>>();
        m.stddev = value.at("std").get<std::vector<double>>();
        if (m.mean.size() != m.stddev.size())
            throw Error(Errc::decode_error, "moment table entry '" + key + "' is inconsistent");
        table.store(PatchCoord{c, r}, std::move(m));
    }
    return table;
}

nlohmann::json pass_report_to_json(const PassReport& report) {
    json strategy{{"kind", strategy_name(report.strategy.kind)},
                  {"epsilon", report.strategy.epsilon}};
    if (report.strategy.kind == StrategyKind::kin) strategy["kin_kernel"] = report.strategy.kin_kernel;
    if (report.strategy.kind == StrategyKind::dn) strategy["granularity"] = report.strategy.granularity;
    return json{{"schema", 1},
                {"mode", report.mode},
                {"steps_executed", report.steps_executed},
                {"patches_translated", report.patches_translated},
                {"prep_ms", report.prep_ms},
                {"run_ms", report.run_ms},
                {"total_ms", report.total_ms},
                {"table_reads", report.table_reads},
                {"table_writes", report.table_writes},
                {"read_before_write", report.read_before_write},
                {"strategy", strategy}};
}

nlohmann::json seam_report_to_json(const SeamReport& report) {
    return json{{"schema", 1},
                {"boundary_mean_absdiff", report.boundary_mean_absdiff},
                {"interior_mean_absdiff", report.interior_mean_absdiff},
                {"seam_ratio", report.seam_ratio},
                {"boundary_pairs", report.boundary_pairs},
                {"interior_pairs", report.interior_pairs},
                {"vertical_boundary_absdiff", report.vertical_boundary_absdiff},
                {"horizontal_boundary_absdiff", report.horizontal_boundary_absdiff}};
}

nlohmann::json bench_report_to_json(const BenchReport& report) {
    json variants = json::array();
    for (const BenchVariant& v : report.variants) {
        variants.push_back(json{{"variant", v.variant},
                                {"per_cell_ms", v.per_cell_ms},
                                {"per_patch_ms", v.per_patch_ms},
                                {"whole_image_ms", v.whole_image_ms},
                                {"speedup", v.speedup}});
    }
    return json{{"schema", 1},
                {"n", report.n},
                {"iterations", report.iterations},
                {"cells", report.cells},
                {"channels", report.channels},
                {"notional_patches", report.notional_patches},
                {"max_rel_error", report.max_rel_error},
                {"variants", variants}};
}

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows) {
    json list = json::array();
    for (const AblationRow& row : rows) {
        json entry = seam_report_to_json(row.seams);
        entry.erase("schema");
        entry["granularity"] = row.granularity;
        list.push_back(entry);
    }
    return json{{"schema", 1}, {"rows", list}};
}

}  // namespace densenorm
