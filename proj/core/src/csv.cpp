#include "lindyn/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lindyn::io {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fields[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + path);
}

CsvTable csv_table(const cosine::ConditionReport& r) {
    CsvTable t;
    t.header = {"k", "n"};
    for (const auto& name : cosine::ConditionReport::names()) t.header.push_back(name);
    t.header.push_back("one_sided_backward");
    t.header.push_back("one_sided_forward_inverse");
    for (std::size_t i = 0; i < r.k.size(); ++i) {
        std::vector<std::string> row{std::to_string(r.k[i]), std::to_string(r.n[i])};
        for (const auto& s : r.seq) row.push_back(csv_number(s[i]));
        row.push_back(csv_number(r.one_sided_backward[i]));
        row.push_back(csv_number(r.one_sided_forward_inverse[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable csv_table(const cosine::DemoReport& r) {
    CsvTable t;
    t.header = {"k", "n", "a", "b", "lambda"};
    for (const auto& row : r.rows)
        t.rows.push_back({std::to_string(row.k), std::to_string(row.n), csv_number(row.a), csv_number(row.b),
                          csv_number(row.lambda)});
    return t;
}

CsvTable csv_table(const luh::LuhCertificate& c) {
    CsvTable t;
    t.header = {"k", "j", "compact", "eps", "witness_n", "stage", "error", "dense_error", "met"};
    for (const auto& e : c.entries)
        t.rows.push_back({std::to_string(e.requirement.target), std::to_string(e.requirement.order),
                          std::to_string(e.requirement.compact), csv_number(e.requirement.eps),
                          e.covered ? std::to_string(e.witness) : "", e.covered ? std::to_string(e.stage) : "",
                          e.covered ? csv_number(e.error) : "", e.dense_error ? csv_number(*e.dense_error) : "",
                          e.met ? "true" : "false"});
    return t;
}

CsvTable csv_table(const std::vector<maps::RunawayCertificate>& certs) {
    CsvTable t;
    t.header = {"compact", "center_re", "center_im", "radius", "witness_n", "separation", "injectivity_margin",
                "exact_separation"};
    for (std::size_t i = 0; i < certs.size(); ++i) {
        const auto& c = certs[i];
        t.rows.push_back({std::to_string(i + 1), csv_number(c.compact.center().real()),
                          csv_number(c.compact.center().imag()), csv_number(c.compact.radius()),
                          std::to_string(c.witness_n), csv_number(c.separation), csv_number(c.injectivity_margin),
                          c.exact_separation ? csv_number(*c.exact_separation) : ""});
    }
    return t;
}

CsvTable csv_table(const luh::DiskChain& ch) {
    CsvTable t;
    t.header = {"n", "G_radius", "L", "r", "d_prev", "eps", "log_eps"};
    for (int n = 1; n <= ch.stages(); ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        t.rows.push_back({std::to_string(n), csv_number(ch.G[i].radius()), csv_number(ch.L[i]), csv_number(ch.r[i]),
                          csv_number(ch.d[i]), csv_number(ch.eps[i]), csv_number(ch.log_eps[i])});
    }
    return t;
}

}  // namespace lindyn::io
