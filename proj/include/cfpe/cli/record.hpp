#pragma once

// Result records and their CSV / JSON serializations.
//
// CSV follows RFC 4180: header row first, comma separator, CRLF-free "\n" line
// ends, fields quoted only when they contain a comma, quote or newline. Numbers
// use the shortest round-trip decimal form with '.' as separator.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cfpe/cli/config.hpp"

namespace cfpe::cli {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void add_row(std::vector<json> row) {
        if (row.size() != columns.size()) throw Error("table '" + name + "' row has wrong arity");
        rows.push_back(std::move(row));
    }
};

struct ResultRecord {
    std::string command;
    std::string experiment_id;
    json config;                       // fully resolved; feeding it back reproduces the outputs
    json outputs = json::object();     // named scalars
    std::vector<Table> tables;
    std::vector<std::string> warnings;
    int exit_code = 0;

    const Table* table(const std::string& name) const {
        for (const auto& t : tables) {
            if (t.name == name) return &t;
        }
        return nullptr;
    }
};

inline std::string experiment_id(const std::string& command, const json& resolved) {
    return command + "-" + fnv1a_hex(command + "\n" + resolved.dump());
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(const json& v) {
    std::string text;
    if (v.is_null()) {
        text = "";
    } else if (v.is_string()) {
        text = v.get<std::string>();
    } else if (v.is_boolean()) {
        text = v.get<bool>() ? "true" : "false";
    } else if (v.is_number_integer()) {
        text = v.dump();
    } else if (v.is_number()) {
        text = format_number(v.get<double>());
    } else {
        text = v.dump();
    }
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

inline void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << "\n";
    }
}

inline json table_to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
        rows.push_back(std::move(obj));
    }
    return rows;
}

inline json record_to_json(const ResultRecord& r, const std::optional<std::string>& timestamp = std::nullopt) {
    json tables = json::object();
    for (const auto& t : r.tables) tables[t.name] = table_to_json(t);
    json doc = json::object();
    doc["experiment_id"] = r.experiment_id;
    doc["command"] = r.command;
    doc["timestamp"] = timestamp ? json(*timestamp) : json(nullptr);
    doc["config"] = r.config;
    doc["outputs"] = r.outputs;
    doc["tables"] = std::move(tables);
    doc["warnings"] = r.warnings;
    return doc;
}

// Writes through a temporary file and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw Error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot move '" + tmp + "' into place: " + ec.message());
}

enum class OutputFormat { Csv, Json };

// Files written into `dir`:
//   json: <command>.json (record with config inline)
//   csv:  <command>.csv (first table), <command>_<table>.csv (the rest),
//         <command>_summary.csv (scalar outputs and warnings as key,value)
//   both: <command>.config.json (resolved config, a valid --config input)
inline std::vector<std::filesystem::path> write_record(const ResultRecord& r, const std::filesystem::path& dir,
                                                       OutputFormat format,
                                                       const std::optional<std::string>& timestamp = std::nullopt) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::filesystem::path& p, const std::string& text) {
        write_file_atomic(p, text);
        written.push_back(p);
    };
    if (format == OutputFormat::Json) {
        emit(dir / (r.command + ".json"), record_to_json(r, timestamp).dump(2) + "\n");
    } else {
        for (std::size_t i = 0; i < r.tables.size(); ++i) {
            std::ostringstream text;
            write_csv(text, r.tables[i]);
            const std::string name = i == 0 ? r.command : r.command + "_" + r.tables[i].name;
            emit(dir / (name + ".csv"), text.str());
        }
        Table summary{"summary", {"key", "value"}, {}};
        for (const auto& [k, v] : r.outputs.items()) summary.add_row({k, v});
        for (const auto& w : r.warnings) summary.add_row({"warning", w});
        std::ostringstream text;
        write_csv(text, summary);
        emit(dir / (r.command + "_summary.csv"), text.str());
    }
    emit(dir / (r.command + ".config.json"), r.config.dump(2) + "\n");
    return written;
}

}  // namespace cfpe::cli
