#include "proxysel/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "proxysel/errors.hpp"

namespace proxysel {

namespace {

// One RFC-4180 record; handles quoted fields (with "" escapes) and embedded
// newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, int& line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            if (!field.empty()) throw ParseError("unexpected quote inside field", line_no);
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            // swallow; the matching \n terminates the record
        } else if (c == '\n') {
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line_no);
    if (!any) return false;
    fields.push_back(std::move(field));
    ++line_no;
    return true;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& outcome) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);

    int line_no = 1;
    std::vector<std::string> header;
    if (!read_record(in, header, line_no)) throw ParseError("empty CSV", 1);
    if (header.size() < 2) throw ParseError("need >= 2 variables (treatments and outcome)", 1);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> fields;
    while (true) {
        int record_line = line_no;
        if (!read_record(in, fields, line_no)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != header.size())
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             record_line);
        std::vector<double> row(fields.size());
        for (size_t i = 0; i < fields.size(); ++i) {
            const std::string& f = fields[i];
            if (f.empty()) throw ParseError("blank cell in column " + header[i], record_line);
            try {
                size_t used = 0;
                row[i] = std::stod(f, &used);
                if (used != f.size()) throw std::invalid_argument(f);
            } catch (const std::exception&) {
                throw ParseError("non-numeric cell '" + f + "' in column " + header[i],
                                 record_line);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ParseError("need at least 2 data rows", line_no);

    int y_col = static_cast<int>(header.size()) - 1;
    if (!outcome.empty()) {
        auto it = std::find(header.begin(), header.end(), outcome);
        if (it == header.end()) throw ParseError("outcome column '" + outcome + "' not found", 1);
        y_col = static_cast<int>(it - header.begin());
    }

    const int ncol = static_cast<int>(header.size());
    Eigen::MatrixXd vals(static_cast<long>(rows.size()), ncol);
    std::vector<std::string> names;
    int out_col = 0;
    for (int c = 0; c < ncol; ++c) {
        if (c == y_col) continue;
        for (size_t r = 0; r < rows.size(); ++r) vals(static_cast<long>(r), out_col) = rows[r][c];
        names.push_back(header[c]);
        ++out_col;
    }
    for (size_t r = 0; r < rows.size(); ++r) vals(static_cast<long>(r), ncol - 1) = rows[r][y_col];
    names.push_back(header[y_col]);
    return Dataset::from_raw(std::move(vals), std::move(names));
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    for (size_t i = 0; i < data.names.size(); ++i) {
        if (i) out << ',';
        out << quote_if_needed(data.names[i]);
    }
    out << '\n';
    char buf[64];
    for (long r = 0; r < data.n(); ++r) {
        for (Eigen::Index c = 0; c < data.values.cols(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", data.values(r, c));
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace proxysel
