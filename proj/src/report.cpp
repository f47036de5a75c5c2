#include "pdo/report.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "pdo/error.hpp"

namespace pdo {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorKind::io, "write to '" + path.string() + "' failed: " + std::strerror(errno));
}

} // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_for_writing(path);
    out << text;
    finish(out, path);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    auto out = open_for_writing(path);
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        require(row.size() == table.columns.size(), ErrorKind::shape, "csv row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
    finish(out, path);
}

void write_symbol_csv(const std::filesystem::path& path, const Symbol& a) {
    auto out = open_for_writing(path);
    const auto& backend = *a.backend();
    out << "# backend: " << backend.describe() << '\n';
    out << "# order: " << format_number(a.order()) << '\n';
    out << "# type: rho=" << format_number(a.rho()) << " delta=" << format_number(a.delta()) << '\n';
    out << "# nx: " << a.nx() << '\n';
    const bool heis = backend.kind() == GroupKind::heisenberg;
    out << "point," << (heis ? "lambda" : "xi") << ",i,j" << (a.is_invariant() ? "" : ",x_index") << ",re,im\n";
    for (std::size_t p = 0; p < a.num_points(); ++p) {
        const std::string coord = format_number(backend.grid().points[p][0]);
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix)
            for (std::size_t i = 0; i < a.dim(); ++i)
                for (std::size_t j = 0; j < a.dim(); ++j) {
                    const cplx v = a.at(ix, p, i, j);
                    out << p << ',' << coord << ',' << i << ',' << j;
                    if (!a.is_invariant()) out << ',' << ix;
                    out << ',' << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
                }
    }
    finish(out, path);
}

} // namespace pdo
