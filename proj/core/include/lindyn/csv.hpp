#pragma once

#include <string>
#include <vector>

#include "lindyn/cosine.hpp"
#include "lindyn/luh.hpp"
#include "lindyn/maps.hpp"

namespace lindyn::io {

// RFC 4180 table: CRLF line ends, fields quoted only when needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

std::string csv_field(const std::string& s);
// Round-trip precision ("%.17g"); non-finite values as inf, -inf, nan.
std::string csv_number(double x);

// Throws std::runtime_error naming the path on I/O failure.
void write_text(const std::string& path, const std::string& text);

CsvTable csv_table(const cosine::ConditionReport& r);
CsvTable csv_table(const cosine::DemoReport& r);
CsvTable csv_table(const luh::LuhCertificate& c);
CsvTable csv_table(const std::vector<maps::RunawayCertificate>& certs);
CsvTable csv_table(const luh::DiskChain& ch);

}  // namespace lindyn::io
