#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "svarma/diagnostics.hpp"
#include "svarma/estimate.hpp"
#include "svarma/irf.hpp"
#include "svarma/model.hpp"

namespace svarma::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Panel data: one named column per series, one row per period.
struct CsvTable {
    std::vector<std::string> names;
    Eigen::MatrixXd data;
};

/// Header row of names, comma-separated numeric rows, '.' decimal point
/// regardless of locale. Throws ErrorKind::parse (with line number) or ErrorKind::io.
[[nodiscard]] CsvTable parse_csv(const std::string& text);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
[[nodiscard]] std::string format_csv(const CsvTable& table);

/// Shortest text that round-trips to the same double (at most 17 significant digits).
[[nodiscard]] std::string format_double(double v);

/// Applies a list of column transforms in order. Each entry defines a new
/// column from existing ones:
///   {"name", "op": "copy",     "column"}
///   {"name", "op": "log",      "column", "scale"?}
///   {"name", "op": "diff",     "column", "lag"?}
///   {"name", "op": "log_diff", "column", "lag"?, "scale"?}
///   {"name", "op": "linear",   "terms": [{"column", "coef"}], "constant"?}
///   {"name", "op": "demean",   "column"}
/// Entries may only reference columns defined earlier, so chains are acyclic.
/// The result keeps `columns` (all columns when empty) and drops leading rows
/// left undefined by lags.
[[nodiscard]] CsvTable apply_transforms(const CsvTable& table, const json& transforms,
                                        const std::vector<std::string>& columns);

[[nodiscard]] SvarmaSpec spec_from_json(const json& model);
/// Reads model["theta"]; a missing lambda falls back to the densities' lambda
/// entries, then to family defaults.
[[nodiscard]] ThetaVector theta_from_json(const SvarmaSpec& spec, const json& model);
[[nodiscard]] json model_to_json(const SvarmaSpec& spec, const ThetaVector& theta);
[[nodiscard]] EstimateOptions options_from_json(const json& options);

[[nodiscard]] json matrix_to_json(const Eigen::MatrixXd& m);
[[nodiscard]] json vector_to_json(const Eigen::VectorXd& v);
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const json& j);
[[nodiscard]] Eigen::VectorXd vector_from_json(const json& j);

[[nodiscard]] json to_json(const EstimationResult& result);
[[nodiscard]] json to_json(const OrderSelection& selection);
[[nodiscard]] json to_json(const std::vector<ComponentDiagnostics>& diag, const std::vector<std::string>& names,
                           int lags);
[[nodiscard]] json to_json(const IrfResult& result, const std::vector<std::string>& names);
/// Long format: horizon,response_var,shock,point,lo,hi (lo/hi empty without bands).
[[nodiscard]] std::string irf_long_csv(const IrfResult& result, const std::vector<std::string>& names);

/// Reads a JSON document from disk; ErrorKind::io / ErrorKind::parse on failure.
[[nodiscard]] json read_json(const std::filesystem::path& path);

}  // namespace svarma::io
