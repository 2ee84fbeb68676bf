#pragma once
#include <string>
#include <vector>

#include "init_fields.hpp"
#include "seir.hpp"

namespace episeir {

// Trajectory table: one row per record with per-subdomain compartment
// populations, optional averaged-region columns, and grand totals.
std::string trajectory_csv(const Trajectory& trajectory);
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns; // column-major

    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

CsvTable read_csv_table(const std::string& path);
CsvTable parse_csv_table(const std::string& text, const std::string& context);

// (subdomain_id, population, infectious, removed), header optional.
std::vector<ProvinceRow> read_province_csv(const std::string& path);

// (x, y, status) with status one of S/E/I/R, header optional. Coordinates are
// multiplied by coordinate_scale (degree-to-km conversion).
std::vector<PopulationPoint> read_points_csv(const std::string& path, double coordinate_scale);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shortest round-trippable decimal representation.
std::string format_double(double v);

} // namespace episeir
