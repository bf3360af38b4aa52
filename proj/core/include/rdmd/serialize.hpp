#pragma once

#include <string>

#include "rdmd/estimators.hpp"
#include "rdmd/modal.hpp"
#include "rdmd/robust_stats.hpp"

namespace rdmd {

// Version stamped into every JSON document this library writes.
inline constexpr int kSchemaVersion = 1;

// JSON text (2-space indent, trailing newline, keys in fixed order) so
// identical inputs serialize to identical bytes.
std::string to_json_string(const OutlierReport& report);
std::string to_json_string(const Spectrum& sp);
// Embeds the outlier report and, when the operator is square, its spectrum.
std::string to_json_string(const OperatorEstimate& est);

OperatorEstimate estimate_from_json(const std::string& text,
                                    const std::string& origin);
OperatorEstimate read_estimate(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Reconstruction in the snapshot CSV layout with a trailing cum_err column
// (omitted when no reference trajectory was supplied).
std::string reconstruction_csv(const ReconstructionResult& recon,
                               const std::vector<std::string>& labels);

// FNV-1a 64-bit content hash, hex encoded; used to fingerprint spec files
// and outputs in run manifests.
std::string content_hash(const std::string& data);

}  // namespace rdmd
