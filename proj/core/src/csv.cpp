#include "fpiv/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace fpiv {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    }
    return out;
}

double parse_double(const std::string& s, int line_no, const std::string& col) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ValidationError("line " + std::to_string(line_no) + ": column '" + col +
                              "' has non-numeric value '" + s + "'");
    return v;
}

std::uint8_t parse_binary(const std::string& s, int line_no, const std::string& col) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ValidationError("line " + std::to_string(line_no) + ": column '" + col +
                          "' must be 0 or 1, got '" + s + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // parallel vector of line numbers below
    std::vector<int> line_no;
};

CsvTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    CsvTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || std::all_of(line.begin(), line.end(), [](char c) {
                return c == ' ' || c == '\t' || c == '\r';
            }))
            continue;
        auto fields = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            if (fields.size() != t.header.size())
                throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(t.header.size()) + " fields, got " +
                                      std::to_string(fields.size()));
            t.rows.push_back(std::move(fields));
            t.line_no.push_back(line_no);
        }
    }
    if (t.header.empty()) throw ValidationError("empty file: " + path);
    if (t.rows.empty()) throw ValidationError("no data rows in file: " + path);
    return t;
}

int find_col(const CsvTable& t, const std::string& name) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
        if (t.header[j] == name) return static_cast<int>(j);
    return -1;
}

int require_col(const CsvTable& t, const std::string& name) {
    const int j = find_col(t, name);
    if (j < 0) throw ValidationError("missing required column '" + name + "'");
    return j;
}

}  // namespace

FactorialDataset load_factorial_csv(const std::string& path,
                                    const std::optional<std::vector<double>>& probs) {
    const CsvTable t = read_table(path);

    int n_factors = 0;
    while (find_col(t, "z" + std::to_string(n_factors + 1)) >= 0) ++n_factors;
    if (n_factors == 0) throw ValidationError("missing required column 'z1'");

    std::vector<int> zc(n_factors), dc(n_factors), pc(n_factors, -1);
    for (int k = 0; k < n_factors; ++k) {
        zc[k] = require_col(t, "z" + std::to_string(k + 1));
        dc[k] = require_col(t, "d" + std::to_string(k + 1));
        pc[k] = find_col(t, "pz" + std::to_string(k + 1));
    }
    const int yc = require_col(t, "y");

    const bool has_pz = pc[0] >= 0;
    for (int k = 0; k < n_factors; ++k) {
        if ((pc[k] >= 0) != has_pz)
            throw ValidationError("pz columns must be present for all factors or none");
    }
    if (has_pz && probs)
        throw ValidationError("assignment probabilities given twice (pz columns and --probs)");
    if (!has_pz && !probs)
        throw ValidationError(
            "no assignment probabilities: provide pz1..pzK columns or --probs");
    if (probs && static_cast<int>(probs->size()) != n_factors)
        throw ValidationError("--probs must list one probability per factor");

    const int n = static_cast<int>(t.rows.size());
    BinaryMatrix z(n, n_factors), d(n, n_factors);
    std::vector<double> y(n);
    std::vector<double> punit;
    if (has_pz) punit.resize(static_cast<std::size_t>(n) * n_factors);

    for (int i = 0; i < n; ++i) {
        const auto& row = t.rows[i];
        const int ln = t.line_no[i];
        for (int k = 0; k < n_factors; ++k) {
            z(i, k) = parse_binary(row[zc[k]], ln, t.header[zc[k]]);
            d(i, k) = parse_binary(row[dc[k]], ln, t.header[dc[k]]);
            if (has_pz)
                punit[static_cast<std::size_t>(i) * n_factors + k] =
                    parse_double(row[pc[k]], ln, t.header[pc[k]]);
        }
        y[i] = parse_double(row[yc], ln, "y");
    }

    AssignmentModel model = has_pz ? AssignmentModel::per_unit(n, n_factors, std::move(punit))
                                   : AssignmentModel::per_column(*probs);
    return FactorialDataset::make(std::move(z), std::move(d), std::move(y), std::move(model));
}

PanelDataset load_panel_csv(const std::string& path,
                            const std::optional<std::vector<double>>& probs) {
    const CsvTable t = read_table(path);
    const int uc = require_col(t, "unit");
    const int tc = require_col(t, "t");
    const int zc = require_col(t, "z");
    const int dc = require_col(t, "d");
    const int yc = require_col(t, "y");
    const int pc = find_col(t, "pz");
    if (pc >= 0 && probs)
        throw ValidationError("assignment probabilities given twice (pz column and --probs)");
    if (pc < 0 && !probs)
        throw ValidationError("no assignment probabilities: provide a pz column or --probs");

    struct Cell {
        std::uint8_t z, d;
        double y, pz;
    };
    std::map<std::string, std::map<int, Cell>> units;  // unit id -> period -> cell
    std::vector<std::string> unit_order;
    int max_t = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int ln = t.line_no[r];
        const std::string& uid = row[uc];
        const double traw = parse_double(row[tc], ln, "t");
        const int tt = static_cast<int>(traw);
        if (traw != tt || tt < 1)
            throw ValidationError("line " + std::to_string(ln) +
                                  ": t must be a positive integer");
        Cell c;
        c.z = parse_binary(row[zc], ln, "z");
        c.d = parse_binary(row[dc], ln, "d");
        c.y = parse_double(row[yc], ln, "y");
        c.pz = pc >= 0 ? parse_double(row[pc], ln, "pz") : 0.0;
        auto [it, inserted] = units.try_emplace(uid);
        if (inserted) unit_order.push_back(uid);
        if (!it->second.emplace(tt, c).second)
            throw ValidationError("line " + std::to_string(ln) + ": duplicate (unit " + uid +
                                  ", t=" + std::to_string(tt) + ")");
        max_t = std::max(max_t, tt);
    }

    std::string offenders;
    for (const auto& uid : unit_order) {
        const auto& per = units.at(uid);
        if (static_cast<int>(per.size()) != max_t || per.begin()->first != 1 ||
            per.rbegin()->first != max_t) {
            if (!offenders.empty()) offenders += ", ";
            offenders += uid;
        }
    }
    if (!offenders.empty())
        throw ValidationError("unbalanced panel; units with missing periods: " + offenders);
    if (probs && static_cast<int>(probs->size()) != max_t)
        throw ValidationError("--probs must list one probability per period");

    const int n = static_cast<int>(unit_order.size());
    BinaryMatrix z(n, max_t), d(n, max_t);
    std::vector<double> y(static_cast<std::size_t>(n) * max_t);
    std::vector<double> punit;
    if (pc >= 0) punit.resize(static_cast<std::size_t>(n) * max_t);
    for (int i = 0; i < n; ++i) {
        const auto& per = units.at(unit_order[i]);
        for (int s = 0; s < max_t; ++s) {
            const Cell& c = per.at(s + 1);
            z(i, s) = c.z;
            d(i, s) = c.d;
            y[static_cast<std::size_t>(i) * max_t + s] = c.y;
            if (pc >= 0) punit[static_cast<std::size_t>(i) * max_t + s] = c.pz;
        }
    }
    AssignmentModel model = pc >= 0 ? AssignmentModel::per_unit(n, max_t, std::move(punit))
                                    : AssignmentModel::per_column(*probs);
    return PanelDataset::make(std::move(z), std::move(d), std::move(y), std::move(model));
}

void write_factorial_csv(const std::string& path, const FactorialDataset& ds) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    const int K = ds.n_factors();
    for (int k = 0; k < K; ++k) out << "z" << k + 1 << ",";
    for (int k = 0; k < K; ++k) out << "d" << k + 1 << ",";
    for (int k = 0; k < K; ++k) out << "pz" << k + 1 << ",";
    out << "y\n";
    for (int i = 0; i < ds.n_units(); ++i) {
        for (int k = 0; k < K; ++k) out << int(ds.z()(i, k)) << ",";
        for (int k = 0; k < K; ++k) out << int(ds.d()(i, k)) << ",";
        for (int k = 0; k < K; ++k) out << format_double(ds.assign_probs().prob(i, k)) << ",";
        out << format_double(ds.y()[i]) << "\n";
    }
}

void write_panel_csv(const std::string& path, const PanelDataset& ds) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "unit,t,z,d,y,pz\n";
    for (int i = 0; i < ds.n_units(); ++i) {
        for (int s = 0; s < ds.n_periods(); ++s) {
            out << i + 1 << "," << s + 1 << "," << int(ds.z()(i, s)) << ","
                << int(ds.d()(i, s)) << "," << format_double(ds.y(i, s)) << ","
                << format_double(ds.propensity().prob(i, s)) << "\n";
        }
    }
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace fpiv
