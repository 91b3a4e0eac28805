#include "entsim/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace entsim::csv {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) pos = text.size();
        std::string line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(std::move(line));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("bad number '" + s + "' in " + where);
    return v;
}

} // namespace

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    write_text_file(path, out);
}

void write_jsa(const std::string& path, const JsaGrid& jsa, int stride) {
    if (stride < 1) throw std::invalid_argument("write_jsa: stride must be >= 1");
    const int n = jsa.n();
    std::string out = "signal_nm";
    for (int i = 0; i < n; i += stride) out += ',' + format_double(jsa.signal_axis[std::size_t(i)]);
    out += "\nidler_nm";
    for (int j = 0; j < n; j += stride) out += ',' + format_double(jsa.idler_axis[std::size_t(j)]);
    out += '\n';
    for (int i = 0; i < n; i += stride) {
        bool first = true;
        for (int j = 0; j < n; j += stride) {
            const std::complex<double> a = jsa.at(i, j);
            if (!first) out += ',';
            first = false;
            out += format_double(a.real());
            out += ',';
            out += format_double(a.imag());
        }
        out += '\n';
    }
    write_text_file(path, out);
}

JsaGrid read_jsa(const std::string& path) {
    const auto ls = lines_of(read_text_file(path));
    if (ls.size() < 3) throw std::runtime_error("jsa csv too short: " + path);
    auto head_s = split(ls[0]);
    auto head_i = split(ls[1]);
    if (head_s.empty() || head_s[0] != "signal_nm" || head_i.empty() || head_i[0] != "idler_nm")
        throw std::runtime_error("jsa csv: bad axis headers in " + path);

    JsaGrid jsa;
    for (std::size_t k = 1; k < head_s.size(); ++k)
        jsa.signal_axis.push_back(parse_double(head_s[k], path));
    for (std::size_t k = 1; k < head_i.size(); ++k)
        jsa.idler_axis.push_back(parse_double(head_i[k], path));
    const std::size_t n = jsa.signal_axis.size();
    if (jsa.idler_axis.size() != n) throw std::runtime_error("jsa csv: axis length mismatch in " + path);
    if (ls.size() != 2 + n) throw std::runtime_error("jsa csv: row count mismatch in " + path);

    jsa.amplitude.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cells = split(ls[2 + i]);
        if (cells.size() != 2 * n)
            throw std::runtime_error("jsa csv: column count mismatch in " + path);
        for (std::size_t j = 0; j < n; ++j)
            jsa.amplitude.emplace_back(parse_double(cells[2 * j], path),
                                       parse_double(cells[2 * j + 1], path));
    }
    // structural invariants must hold for an import; the norm is re-pinned
    // because a file may carry a subsampled (hence unnormalized) grid
    jsa.renormalize();
    jsa.validate();
    return jsa;
}

void write_density_matrix(const std::string& path, const DensityMatrix2Q& rho) {
    std::string out = "# basis,HH,HV,VH,VV\n# re\n";
    const Mat4c& m = rho.elements();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j).real());
        }
        out += '\n';
    }
    out += "# im\n";
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j).imag());
        }
        out += '\n';
    }
    write_text_file(path, out);
}

Mat4c read_density_matrix_elements(const std::string& path) {
    const auto ls = lines_of(read_text_file(path));
    if (ls.size() != 11 || ls[0] != "# basis,HH,HV,VH,VV" || ls[1] != "# re" || ls[6] != "# im")
        throw std::runtime_error("density matrix csv: bad layout in " + path);
    Mat4c m;
    for (int i = 0; i < 4; ++i) {
        const auto re = split(ls[std::size_t(2 + i)]);
        const auto im = split(ls[std::size_t(7 + i)]);
        if (re.size() != 4 || im.size() != 4)
            throw std::runtime_error("density matrix csv: bad row in " + path);
        for (int j = 0; j < 4; ++j)
            m(i, j) = std::complex<double>(parse_double(re[std::size_t(j)], path),
                                           parse_double(im[std::size_t(j)], path));
    }
    return m;
}

void write_records(const std::string& path, const std::vector<MeasurementRecord>& records) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(records.size());
    for (const auto& r : records)
        rows.push_back({r.setting.label_a, r.setting.label_b, format_double(r.setting.hwp_a_deg),
                        format_double(r.setting.qwp_a_deg), format_double(r.setting.hwp_b_deg),
                        format_double(r.setting.qwp_b_deg), std::to_string(r.counts),
                        format_double(r.integration_seconds)});
    write_table(path,
                {"label_a", "label_b", "hwp_a_deg", "qwp_a_deg", "hwp_b_deg", "qwp_b_deg",
                 "counts", "integration_seconds"},
                rows);
}

std::vector<MeasurementRecord> read_records(const std::string& path) {
    const auto ls = lines_of(read_text_file(path));
    if (ls.empty() || split(ls[0]).size() != 8)
        throw std::runtime_error("records csv: bad header in " + path);
    std::vector<MeasurementRecord> out;
    for (std::size_t k = 1; k < ls.size(); ++k) {
        const auto c = split(ls[k]);
        if (c.size() != 8) throw std::runtime_error("records csv: bad row in " + path);
        MeasurementRecord r;
        r.setting.label_a = c[0];
        r.setting.label_b = c[1];
        r.setting.hwp_a_deg = parse_double(c[2], path);
        r.setting.qwp_a_deg = parse_double(c[3], path);
        r.setting.hwp_b_deg = parse_double(c[4], path);
        r.setting.qwp_b_deg = parse_double(c[5], path);
        const long long counts = std::strtoll(c[6].c_str(), nullptr, 10);
        if (counts < 0) throw std::runtime_error("records csv: negative counts in " + path);
        r.counts = std::uint64_t(counts);
        r.integration_seconds = parse_double(c[7], path);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace entsim::csv
