#ifndef VERTSIM_IO_HPP
#define VERTSIM_IO_HPP

#include "vertsim/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vertsim {

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames, so a crash never leaves a
// truncated artifact under the final name.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

// FNV-1a over the file bytes, rendered as 16 hex digits.
std::string digest_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

// Sweep datasets persist as a directory: sweep_index.json carries the full
// run configuration plus one entry per (point, replication), each pointing
// at a packet CSV. Doubles round-trip losslessly in both files.
void write_sweep_dataset(const SweepDataset& dataset, const std::filesystem::path& dir);
SweepDataset read_sweep_dataset(const std::filesystem::path& dir);

std::string packet_csv_header();
std::string packet_record_csv(const PacketRecord& r);
PacketRecord packet_record_from_csv(const std::string& line);
std::string sweep_point_file(std::size_t point_index, int replication);

void write_distribution_table(const DistributionTable& table, const std::filesystem::path& path);
DistributionTable read_distribution_table(const std::filesystem::path& path);

void write_model_set(const ModelSet& models, const std::filesystem::path& path);
ModelSet read_model_set(const std::filesystem::path& path);

// Condition intervals: one row per (cell, span), counts as a brace field
// so the row stays a fixed four columns.
void write_intervals(const std::vector<ConditionInterval>& intervals,
                     const std::filesystem::path& path);
std::vector<ConditionInterval> read_intervals(const std::filesystem::path& path);

void write_packet_log(const std::vector<CityPacket>& log, const std::filesystem::path& path);
std::vector<CityPacket> read_packet_log(const std::filesystem::path& path);

nlohmann::json vertical_report_to_json(const VerticalReport& report);
void write_vertical_report(const VerticalReport& report, const std::filesystem::path& path);
void write_cell_summary_csv(const std::vector<CellKpis>& cells,
                            const std::filesystem::path& path);

nlohmann::json validation_report_to_json(const ValidationReport& report);
ValidationReport validation_report_from_json(const nlohmann::json& j);
void write_validation_report(const ValidationReport& report, const std::filesystem::path& path);
void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path);

// Activity statistics alongside the interval stream.
nlohmann::json activity_stats_to_json(const ActivityStats& stats);

// Record of one CLI run: inputs, seed, and a digest per output file. The
// manifest itself is excluded from the digest list (it contains wall time).
struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
    std::vector<std::pair<std::string, std::string>> outputs; // (name, digest)
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

} // namespace vertsim

#endif
