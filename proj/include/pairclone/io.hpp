#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "pairclone/data.hpp"
#include "pairclone/selection.hpp"
#include "pairclone/simulate.hpp"
#include "pairclone/summary.hpp"

namespace pairclone {

/// Counts TSV: sample_id pair_id n00 n01 n10 n11 nm0 nm1 n0m n1m.
ReadCountTensor parse_counts(std::istream& in);
ReadCountTensor parse_counts(const std::filesystem::path& path);
void write_counts(std::ostream& out, const ReadCountTensor& data);
void write_counts(const std::filesystem::path& path, const ReadCountTensor& data);

/// SNV sidecar TSV: sample_id snv_id total variant. Sample order follows sample_ids when given.
SnvCounts parse_snvs(std::istream& in, const std::vector<std::string>& sample_ids = {});
SnvCounts parse_snvs(const std::filesystem::path& path, const std::vector<std::string>& sample_ids = {});
void write_snvs(std::ostream& out, const SnvCounts& snvs, const std::vector<std::string>& sample_ids);
void write_snvs(const std::filesystem::path& path, const SnvCounts& snvs, const std::vector<std::string>& sample_ids);

nlohmann::json truth_json(const SimulatedData& sim);
nlohmann::json selection_json(const SelectionResult& result);
nlohmann::json summary_json(const PointEstimate& estimate, const ResidualSummary& residuals, const SplitGenotypes* split);

void write_residuals(const std::filesystem::path& path, const std::vector<Residual>& r, const ReadCountTensor& data);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace pairclone
