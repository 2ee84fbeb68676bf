#include "csv_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace episeir {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    if (trajectory.records.empty()) throw InvalidArgument("empty trajectory");
    const TrajectoryRecord& first = trajectory.records.front();
    const int nl = static_cast<int>(first.s.size());
    const bool has_ode = first.has_ode;

    std::string out = "time";
    for (int l = 1; l <= nl; ++l) {
        const std::string suffix = "_" + std::to_string(l);
        out += ",s" + suffix + ",e" + suffix + ",i" + suffix + ",r" + suffix;
    }
    if (has_ode) out += ",ode_s,ode_e,ode_i,ode_r";
    out += ",total_s,total_e,total_i,total_r\n";

    for (const TrajectoryRecord& rec : trajectory.records) {
        out += format_double(rec.time);
        double ts = 0.0, te = 0.0, ti = 0.0, tr = 0.0;
        for (int l = 0; l < nl; ++l) {
            out += "," + format_double(rec.s[l]) + "," + format_double(rec.e[l]) + "," +
                   format_double(rec.i[l]) + "," + format_double(rec.r[l]);
            ts += rec.s[l];
            te += rec.e[l];
            ti += rec.i[l];
            tr += rec.r[l];
        }
        if (has_ode) {
            out += "," + format_double(rec.ode_s) + "," + format_double(rec.ode_e) + "," +
                   format_double(rec.ode_i) + "," + format_double(rec.ode_r);
            ts += rec.ode_s;
            te += rec.ode_e;
            ti += rec.ode_i;
            tr += rec.ode_r;
        }
        out += "," + format_double(ts) + "," + format_double(te) + "," + format_double(ti) + "," +
               format_double(tr) + "\n";
    }
    return out;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    write_text_file(path, trajectory_csv(trajectory));
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return columns[c];
    throw InvalidArgument("csv table has no column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
    for (const std::string& h : header)
        if (h == name) return true;
    return false;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.erase(cell.begin());
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

} // namespace

CsvTable parse_csv_table(const std::string& text, const std::string& context) {
    std::istringstream stream(text);
    std::string line;
    long line_number = 0;
    CsvTable table;
    bool saw_header = false;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.empty()) continue;
        if (!saw_header) {
            if (is_number(cells[0])) {
                // Headerless table: synthesize column names c0, c1, ...
                for (size_t c = 0; c < cells.size(); ++c) table.header.push_back("c" + std::to_string(c));
            } else {
                table.header = cells;
            }
            table.columns.resize(table.header.size());
            saw_header = true;
            if (!is_number(cells[0])) continue;
        }
        if (cells.size() != table.header.size())
            throw ParseError(context, line_number, "expected " + std::to_string(table.header.size()) +
                                                       " columns, got " + std::to_string(cells.size()));
        for (size_t c = 0; c < cells.size(); ++c) {
            if (!is_number(cells[c]))
                throw ParseError(context, line_number, "'" + cells[c] + "' is not a number");
            table.columns[c].push_back(std::strtod(cells[c].c_str(), nullptr));
        }
    }
    if (!saw_header) throw ParseError(context, line_number, "empty table");
    return table;
}

CsvTable read_csv_table(const std::string& path) {
    return parse_csv_table(read_text_file(path), path);
}

std::vector<ProvinceRow> read_province_csv(const std::string& path) {
    std::istringstream stream(read_text_file(path));
    std::string line;
    long line_number = 0;
    std::vector<ProvinceRow> rows;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.empty()) continue;
        if (!is_number(cells[0])) continue; // header
        if (cells.size() != 4)
            throw ParseError(path, line_number, "expected subdomain_id,population,infectious,removed");
        for (const std::string& c : cells)
            if (!is_number(c)) throw ParseError(path, line_number, "'" + c + "' is not a number");
        ProvinceRow row;
        row.subdomain = static_cast<int>(std::strtod(cells[0].c_str(), nullptr));
        row.population = std::strtod(cells[1].c_str(), nullptr);
        row.infectious = std::strtod(cells[2].c_str(), nullptr);
        row.removed = std::strtod(cells[3].c_str(), nullptr);
        rows.push_back(row);
    }
    if (rows.empty()) throw ParseError(path, line_number, "no province rows");
    return rows;
}

std::vector<PopulationPoint> read_points_csv(const std::string& path, double coordinate_scale) {
    std::istringstream stream(read_text_file(path));
    std::string line;
    long line_number = 0;
    std::vector<PopulationPoint> points;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.empty()) continue;
        if (!is_number(cells[0])) continue; // header
        if (cells.size() != 3) throw ParseError(path, line_number, "expected x,y,status");
        if (!is_number(cells[0]) || !is_number(cells[1]))
            throw ParseError(path, line_number, "bad coordinate");
        PopulationPoint p;
        p.position = {coordinate_scale * std::strtod(cells[0].c_str(), nullptr),
                      coordinate_scale * std::strtod(cells[1].c_str(), nullptr)};
        if (cells[2] == "S" || cells[2] == "s") p.status = HealthStatus::Susceptible;
        else if (cells[2] == "E" || cells[2] == "e") p.status = HealthStatus::Exposed;
        else if (cells[2] == "I" || cells[2] == "i") p.status = HealthStatus::Infectious;
        else if (cells[2] == "R" || cells[2] == "r") p.status = HealthStatus::Removed;
        else throw ParseError(path, line_number, "status must be one of S, E, I, R");
        points.push_back(p);
    }
    if (points.empty()) throw ParseError(path, line_number, "no points");
    return points;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
    if (!out) throw Error("failed writing file: " + path);
}

} // namespace episeir
