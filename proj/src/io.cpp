#include "vertsim/io.hpp"

#include "vertsim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vertsim {

namespace {

using nlohmann::json;

double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw DataError(std::string("malformed ") + what + " value: '" + s + "'");
    return v;
}

std::int64_t parse_i64_field(const std::string& s, const char* what) {
    std::int64_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw DataError(std::string("malformed ") + what + " value: '" + s + "'");
    return v;
}

bool parse_bool_field(const std::string& s, const char* what) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw DataError(std::string("malformed ") + what + " flag: '" + s + "'");
}

// Names are embedded in CSV rows unquoted; the separators are reserved.
void check_csv_safe(const std::string& name, const char* what,
                    const char* forbidden = ",{}\n") {
    if (name.find_first_of(forbidden) != std::string::npos)
        throw DataError(std::string(what) + " contains a CSV separator: '" + name + "'");
}

// Free-text trailing field: commas and newlines become ';' so the row arity
// stays fixed.
std::string csv_free_text(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

// JSON has no literal for non-finite numbers; they are persisted as strings
// and accepted back in either form.
json json_double(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double double_from_json(const json& v, const char* what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_double_field(v.get<std::string>(), what);
    throw DataError(std::string("malformed ") + what + " in json");
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        lines.emplace_back(text, start, end - start);
        start = end + 1;
    }
    return lines;
}

std::string join_params(const std::vector<double>& params) {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ';';
        out += format_double(params[i]);
    }
    return out;
}

std::vector<double> split_params(const std::string& field, const char* what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= field.size()) {
        std::size_t end = field.find(';', start);
        if (end == std::string::npos) end = field.size();
        out.push_back(parse_double_field(field.substr(start, end - start), what));
        start = end + 1;
    }
    return out;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError("malformed " + what + ": " + e.what());
    }
}

void require_format(const json& j, const char* tag, const std::string& what) {
    if (!j.is_object() || !j.contains("format") || !j.at("format").is_string() ||
        j.at("format").get<std::string>() != tag)
        throw DataError(what + " is missing the format tag \"" + tag + "\"");
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw DataError("read failed: " + path.string());
    return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot create file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("rename failed for " + path.string() + ": " + ec.message());
}

std::string digest_bytes(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

std::string digest_file(const std::filesystem::path& path) {
    return digest_bytes(read_text_file(path));
}

std::string sweep_point_file(std::size_t point_index, int replication) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "point_%05zu_rep_%03d.csv", point_index, replication);
    return buf;
}

std::string packet_csv_header() {
    return "packet_id,device_id,profile,created_at_s,delay_ms,dropped,throughput_bps,snr_db";
}

std::string packet_record_csv(const PacketRecord& r) {
    std::string out;
    out += std::to_string(r.packet_id);
    out += ',';
    out += std::to_string(r.device_id);
    out += ',';
    out += r.profile;
    out += ',';
    out += format_double(r.created_at_s);
    out += ',';
    out += format_double(r.delay_ms);
    out += ',';
    out += r.dropped ? '1' : '0';
    out += ',';
    out += format_double(r.throughput_bps);
    out += ',';
    out += format_double(r.snr_db);
    return out;
}

PacketRecord packet_record_from_csv(const std::string& line) {
    const auto f = split_csv(line);
    if (f.size() != 8) throw DataError("packet row needs 8 fields: '" + line + "'");
    PacketRecord r;
    r.packet_id = parse_i64_field(f[0], "packet_id");
    r.device_id = parse_i64_field(f[1], "device_id");
    r.profile = f[2];
    r.created_at_s = parse_double_field(f[3], "created_at_s");
    r.delay_ms = parse_double_field(f[4], "delay_ms");
    r.dropped = parse_bool_field(f[5], "dropped");
    r.throughput_bps = parse_double_field(f[6], "throughput_bps");
    r.snr_db = parse_double_field(f[7], "snr_db");
    return r;
}

void write_sweep_dataset(const SweepDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json index;
    index["format"] = "vertsim-sweep/1";
    index["duration_s"] = dataset.duration_s;
    index["sim"] = sim_params_to_json(dataset.params);
    index["base"] = conditions_to_json(dataset.base);
    index["grid"] = grid_to_json(dataset.grid);
    json points = json::array();
    for (const auto& p : dataset.points) {
        json entry;
        entry["point_index"] = p.point_index;
        entry["replication"] = p.replication;
        entry["seed"] = p.seed;
        entry["values"] = p.values;
        entry["packets"] = p.records.size();
        entry["error"] = p.error;
        if (p.error.empty()) {
            const std::string name = sweep_point_file(p.point_index, p.replication);
            entry["file"] = name;
            std::string csv;
            csv.reserve(64 * (p.records.size() + 4));
            csv += "# point_index=" + std::to_string(p.point_index) + "\n";
            csv += "# replication=" + std::to_string(p.replication) + "\n";
            csv += "# seed=" + hex64(p.seed) + "\n";
            csv += packet_csv_header();
            csv += '\n';
            for (const auto& r : p.records) {
                csv += packet_record_csv(r);
                csv += '\n';
            }
            write_text_file_atomic(dir / name, csv);
        } else {
            entry["file"] = "";
        }
        points.push_back(std::move(entry));
    }
    index["points"] = std::move(points);
    write_text_file_atomic(dir / "sweep_index.json", index.dump(2) + "\n");
}

SweepDataset read_sweep_dataset(const std::filesystem::path& dir) {
    const auto index_path = dir / "sweep_index.json";
    const json index = parse_json_text(read_text_file(index_path), index_path.string());
    require_format(index, "vertsim-sweep/1", index_path.string());
    SweepDataset out;
    out.duration_s = index.at("duration_s").get<double>();
    out.params = sim_params_from_json(index.at("sim"), "sweep index sim");
    out.base = conditions_from_json(index.at("base"), "sweep index base");
    out.grid = grid_from_json(index.at("grid"), 0, "sweep index grid");
    for (const auto& entry : index.at("points")) {
        SweepPointResult p;
        p.point_index = entry.at("point_index").get<std::size_t>();
        p.replication = entry.at("replication").get<int>();
        p.seed = entry.at("seed").get<std::uint64_t>();
        p.values = entry.at("values").get<std::vector<double>>();
        p.error = entry.at("error").get<std::string>();
        const std::string file = entry.at("file").get<std::string>();
        if (p.error.empty()) {
            const auto lines = read_lines(dir / file);
            std::size_t i = 0;
            while (i < lines.size() && !lines[i].empty() && lines[i][0] == '#') ++i;
            if (i >= lines.size() || lines[i] != packet_csv_header())
                throw DataError("bad packet header in " + (dir / file).string());
            for (++i; i < lines.size(); ++i) {
                if (lines[i].empty()) continue;
                p.records.push_back(packet_record_from_csv(lines[i]));
            }
            if (p.records.size() != entry.at("packets").get<std::size_t>())
                throw DataError("packet count mismatch in " + (dir / file).string());
        }
        out.points.push_back(std::move(p));
    }
    return out;
}

void write_distribution_table(const DistributionTable& table,
                              const std::filesystem::path& path) {
    std::string csv = "point_index";
    for (const auto& label : table.axis_labels) {
        check_csv_safe(label, "axis label");
        csv += ',';
        csv += label;
    }
    csv += ",kpi,family,params,ks,n\n";
    for (const auto& row : table.rows) {
        if (row.values.size() != table.axis_labels.size())
            throw DataError("distribution row arity does not match the axis labels");
        csv += std::to_string(row.point_index);
        for (double v : row.values) {
            csv += ',';
            csv += format_double(v);
        }
        csv += ',';
        csv += kpi_name(row.dist.kpi);
        csv += ',';
        csv += family_name(row.dist.family);
        csv += ',';
        csv += join_params(row.dist.params);
        csv += ',';
        csv += format_double(row.dist.ks_statistic);
        csv += ',';
        csv += std::to_string(row.dist.sample_count);
        csv += '\n';
    }
    write_text_file_atomic(path, csv);
}

DistributionTable read_distribution_table(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError("empty distribution table: " + path.string());
    const auto header = split_csv(lines[0]);
    if (header.size() < 6 || header.front() != "point_index" ||
        header[header.size() - 5] != "kpi" || header.back() != "n")
        throw DataError("bad distribution table header: " + path.string());
    DistributionTable table;
    table.axis_labels.assign(header.begin() + 1, header.end() - 5);
    const std::size_t n_axes = table.axis_labels.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != header.size())
            throw DataError("distribution row has wrong arity: '" + lines[i] + "'");
        DistTableRow row;
        row.point_index = static_cast<std::size_t>(parse_i64_field(f[0], "point_index"));
        for (std::size_t a = 0; a < n_axes; ++a)
            row.values.push_back(parse_double_field(f[1 + a], "axis value"));
        row.dist.kpi = kpi_from_name(f[1 + n_axes]);
        row.dist.family = family_from_name(f[2 + n_axes]);
        row.dist.params = split_params(f[3 + n_axes], "params");
        row.dist.ks_statistic = parse_double_field(f[4 + n_axes], "ks");
        row.dist.sample_count = static_cast<std::size_t>(parse_i64_field(f[5 + n_axes], "n"));
        validate_params(row.dist.family, row.dist.params);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_model_set(const ModelSet& models, const std::filesystem::path& path) {
    json j;
    j["format"] = "vertsim-surrogate/1";
    json arr = json::array();
    for (const auto& m : models.models) {
        json mj;
        mj["kpi"] = kpi_name(m.kpi);
        mj["family"] = family_name(m.family);
        mj["regressor"] = regressor_name(m.regressor);
        json domain = json::array();
        for (const auto& d : m.domain)
            domain.push_back(json{{"label", d.label}, {"lo", d.lo}, {"hi", d.hi}});
        mj["domain"] = std::move(domain);
        mj["training_error"] = m.training_error;
        mj["grid_axes"] = m.grid_axes;
        mj["knot_params"] = m.knot_params;
        mj["degree"] = m.degree;
        mj["ridge_weight"] = m.ridge_weight;
        mj["coefs"] = m.coefs;
        arr.push_back(std::move(mj));
    }
    j["models"] = std::move(arr);
    write_text_file_atomic(path, j.dump(2) + "\n");
}

ModelSet read_model_set(const std::filesystem::path& path) {
    const json j = parse_json_text(read_text_file(path), path.string());
    require_format(j, "vertsim-surrogate/1", path.string());
    ModelSet out;
    for (const auto& mj : j.at("models")) {
        SurrogateModel m;
        m.kpi = kpi_from_name(mj.at("kpi").get<std::string>());
        m.family = family_from_name(mj.at("family").get<std::string>());
        m.regressor = regressor_from_name(mj.at("regressor").get<std::string>());
        for (const auto& dj : mj.at("domain")) {
            AxisDomain d;
            d.label = dj.at("label").get<std::string>();
            d.lo = dj.at("lo").get<double>();
            d.hi = dj.at("hi").get<double>();
            m.domain.push_back(std::move(d));
        }
        m.training_error = mj.at("training_error").get<std::vector<double>>();
        m.grid_axes = mj.at("grid_axes").get<std::vector<std::vector<double>>>();
        m.knot_params = mj.at("knot_params").get<std::vector<std::vector<double>>>();
        m.degree = mj.at("degree").get<int>();
        m.ridge_weight = mj.at("ridge_weight").get<double>();
        m.coefs = mj.at("coefs").get<std::vector<std::vector<double>>>();
        m.validate();
        out.models.push_back(std::move(m));
    }
    return out;
}

void write_intervals(const std::vector<ConditionInterval>& intervals,
                     const std::filesystem::path& path) {
    std::string csv = "cell_id,t0_s,t1_s,counts\n";
    for (const auto& iv : intervals) {
        csv += std::to_string(iv.cell_id);
        csv += ',';
        csv += format_double(iv.t0_s);
        csv += ',';
        csv += format_double(iv.t1_s);
        csv += ",{";
        bool first = true;
        for (const auto& [name, count] : iv.device_counts) {
            check_csv_safe(name, "profile name", ",{}\n:");
            if (!first) csv += ',';
            first = false;
            csv += name;
            csv += ':';
            csv += std::to_string(count);
        }
        csv += "}\n";
    }
    write_text_file_atomic(path, csv);
}

std::vector<ConditionInterval> read_intervals(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "cell_id,t0_s,t1_s,counts")
        throw DataError("bad interval header: " + path.string());
    std::vector<ConditionInterval> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 4) throw DataError("interval row needs 4 fields: '" + lines[i] + "'");
        ConditionInterval iv;
        iv.cell_id = static_cast<int>(parse_i64_field(f[0], "cell_id"));
        iv.t0_s = parse_double_field(f[1], "t0_s");
        iv.t1_s = parse_double_field(f[2], "t1_s");
        const std::string& counts = f[3];
        if (counts.size() < 2 || counts.front() != '{' || counts.back() != '}')
            throw DataError("malformed counts field: '" + counts + "'");
        std::size_t start = 1;
        while (start < counts.size() - 1) {
            std::size_t end = counts.find(',', start);
            if (end == std::string::npos || end > counts.size() - 1) end = counts.size() - 1;
            const std::string pair = counts.substr(start, end - start);
            const std::size_t colon = pair.find(':');
            if (colon == std::string::npos)
                throw DataError("malformed counts entry: '" + pair + "'");
            iv.device_counts[pair.substr(0, colon)] =
                static_cast<int>(parse_i64_field(pair.substr(colon + 1), "device count"));
            start = end + 1;
        }
        out.push_back(std::move(iv));
    }
    return out;
}

void write_packet_log(const std::vector<CityPacket>& log, const std::filesystem::path& path) {
    std::string csv = "cell_id,entity_id,profile,timestamp_s,delay_ms,dropped,throughput_bps\n";
    csv.reserve(csv.size() + 64 * log.size());
    for (const auto& p : log) {
        csv += std::to_string(p.cell_id);
        csv += ',';
        csv += std::to_string(p.entity_id);
        csv += ',';
        csv += p.profile;
        csv += ',';
        csv += format_double(p.timestamp_s);
        csv += ',';
        csv += format_double(p.delay_ms);
        csv += ',';
        csv += p.dropped ? '1' : '0';
        csv += ',';
        csv += format_double(p.throughput_bps);
        csv += '\n';
    }
    write_text_file_atomic(path, csv);
}

std::vector<CityPacket> read_packet_log(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() ||
        lines[0] != "cell_id,entity_id,profile,timestamp_s,delay_ms,dropped,throughput_bps")
        throw DataError("bad packet log header: " + path.string());
    std::vector<CityPacket> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 7) throw DataError("packet log row needs 7 fields: '" + lines[i] + "'");
        CityPacket p;
        p.cell_id = static_cast<int>(parse_i64_field(f[0], "cell_id"));
        p.entity_id = parse_i64_field(f[1], "entity_id");
        p.profile = f[2];
        p.timestamp_s = parse_double_field(f[3], "timestamp_s");
        p.delay_ms = parse_double_field(f[4], "delay_ms");
        p.dropped = parse_bool_field(f[5], "dropped");
        p.throughput_bps = parse_double_field(f[6], "throughput_bps");
        out.push_back(std::move(p));
    }
    return out;
}

nlohmann::json vertical_report_to_json(const VerticalReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back(json{{"cell_id", c.cell_id},
                             {"packets", c.packets},
                             {"delivered", c.delivered},
                             {"dropped", c.dropped},
                             {"drop_rate", json_double(c.drop_rate)},
                             {"mean_delay_ms", json_double(c.mean_delay_ms)},
                             {"p50_delay_ms", json_double(c.p50_delay_ms)},
                             {"p95_delay_ms", json_double(c.p95_delay_ms)},
                             {"p99_delay_ms", json_double(c.p99_delay_ms)},
                             {"jitter_ms", json_double(c.jitter_ms)},
                             {"mean_throughput_bps", json_double(c.mean_throughput_bps)}});
    }
    json users = json::array();
    for (const auto& u : report.users) {
        users.push_back(json{{"entity_id", u.entity_id},
                             {"profile", u.profile},
                             {"packets", u.packets},
                             {"sessions", u.sessions},
                             {"violation_rate", json_double(u.violation_rate)},
                             {"worst_p95_ms", json_double(u.worst_p95_ms)}});
    }
    return json{{"format", "vertsim-report/1"},
                {"total_packets", report.total_packets},
                {"delivered", report.delivered},
                {"dropped", report.dropped},
                {"drop_rate", json_double(report.drop_rate)},
                {"entity_days", report.entity_days},
                {"bad_experience_fraction", json_double(report.bad_experience_fraction)},
                {"thresholds",
                 json{{"delay_budget_ms", report.thresholds.delay_budget_ms},
                      {"bad_experience_frac", report.thresholds.bad_experience_frac},
                      {"session_s", report.thresholds.session_s},
                      {"day_s", report.thresholds.day_s}}},
                {"cells", std::move(cells)},
                {"users", std::move(users)}};
}

void write_vertical_report(const VerticalReport& report, const std::filesystem::path& path) {
    write_text_file_atomic(path, vertical_report_to_json(report).dump(2) + "\n");
}

void write_cell_summary_csv(const std::vector<CellKpis>& cells,
                            const std::filesystem::path& path) {
    std::string csv =
        "cell_id,packets,delivered,dropped,drop_rate,mean_delay_ms,p50_delay_ms,"
        "p95_delay_ms,p99_delay_ms,jitter_ms,mean_throughput_bps\n";
    for (const auto& c : cells) {
        csv += std::to_string(c.cell_id);
        csv += ',';
        csv += std::to_string(c.packets);
        csv += ',';
        csv += std::to_string(c.delivered);
        csv += ',';
        csv += std::to_string(c.dropped);
        csv += ',';
        csv += format_double(c.drop_rate);
        csv += ',';
        csv += format_double(c.mean_delay_ms);
        csv += ',';
        csv += format_double(c.p50_delay_ms);
        csv += ',';
        csv += format_double(c.p95_delay_ms);
        csv += ',';
        csv += format_double(c.p99_delay_ms);
        csv += ',';
        csv += format_double(c.jitter_ms);
        csv += ',';
        csv += format_double(c.mean_throughput_bps);
        csv += '\n';
    }
    write_text_file_atomic(path, csv);
}

nlohmann::json validation_report_to_json(const ValidationReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{{"condition_index", e.condition_index},
                               {"kpi", kpi_name(e.kpi)},
                               {"ks_distance", json_double(e.ks_distance)},
                               {"mean_error", json_double(e.mean_error)},
                               {"reference_mean", json_double(e.reference_mean)},
                               {"surrogate_mean", json_double(e.surrogate_mean)},
                               {"n_reference", e.n_reference},
                               {"n_surrogate", e.n_surrogate},
                               {"pass", e.pass},
                               {"error", e.error}});
    }
    return json{{"format", "vertsim-validation/1"},
                {"pass", report.pass},
                {"tolerances", json{{"ks", report.tolerances.ks}, {"mean", report.tolerances.mean}}},
                {"entries", std::move(entries)}};
}

ValidationReport validation_report_from_json(const nlohmann::json& j) {
    require_format(j, "vertsim-validation/1", "validation report");
    ValidationReport out;
    out.pass = j.at("pass").get<bool>();
    out.tolerances.ks = j.at("tolerances").at("ks").get<double>();
    out.tolerances.mean = j.at("tolerances").at("mean").get<double>();
    for (const auto& ej : j.at("entries")) {
        ValidationEntry e;
        e.condition_index = ej.at("condition_index").get<std::size_t>();
        e.kpi = kpi_from_name(ej.at("kpi").get<std::string>());
        e.ks_distance = double_from_json(ej.at("ks_distance"), "ks_distance");
        e.mean_error = double_from_json(ej.at("mean_error"), "mean_error");
        e.reference_mean = double_from_json(ej.at("reference_mean"), "reference_mean");
        e.surrogate_mean = double_from_json(ej.at("surrogate_mean"), "surrogate_mean");
        e.n_reference = ej.at("n_reference").get<std::size_t>();
        e.n_surrogate = ej.at("n_surrogate").get<std::size_t>();
        e.pass = ej.at("pass").get<bool>();
        e.error = ej.at("error").get<std::string>();
        out.entries.push_back(std::move(e));
    }
    return out;
}

void write_validation_report(const ValidationReport& report,
                             const std::filesystem::path& path) {
    write_text_file_atomic(path, validation_report_to_json(report).dump(2) + "\n");
}

void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path) {
    std::string csv =
        "condition_index,kpi,ks_distance,mean_error,reference_mean,surrogate_mean,"
        "n_reference,n_surrogate,pass,error\n";
    for (const auto& e : report.entries) {
        csv += std::to_string(e.condition_index);
        csv += ',';
        csv += kpi_name(e.kpi);
        csv += ',';
        csv += format_double(e.ks_distance);
        csv += ',';
        csv += format_double(e.mean_error);
        csv += ',';
        csv += format_double(e.reference_mean);
        csv += ',';
        csv += format_double(e.surrogate_mean);
        csv += ',';
        csv += std::to_string(e.n_reference);
        csv += ',';
        csv += std::to_string(e.n_surrogate);
        csv += ',';
        csv += e.pass ? '1' : '0';
        csv += ',';
        csv += csv_free_text(e.error);
        csv += '\n';
    }
    write_text_file_atomic(path, csv);
}

nlohmann::json activity_stats_to_json(const ActivityStats& stats) {
    return json{{"interval_count", stats.interval_count},
                {"mean_interval_s", json_double(stats.mean_interval_s)},
                {"mean_occupancy", json_double(stats.mean_occupancy)},
                {"change_rate_per_s", json_double(stats.change_rate_per_s)},
                {"coverage_gap_fraction", json_double(stats.coverage_gap_fraction)}};
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
    json inputs = json::array();
    for (const auto& [path, digest] : manifest.inputs)
        inputs.push_back(json{{"file", path}, {"digest", digest}});
    json outputs = json::array();
    auto sorted = manifest.outputs;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [name, digest] : sorted)
        outputs.push_back(json{{"file", name}, {"digest", digest}});
    const json j{{"format", "vertsim-manifest/1"},
                 {"command", manifest.command},
                 {"version", manifest.version},
                 {"seed", manifest.seed},
                 {"wall_ms", manifest.wall_ms},
                 {"inputs", std::move(inputs)},
                 {"outputs", std::move(outputs)}};
    write_text_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

} // namespace vertsim
