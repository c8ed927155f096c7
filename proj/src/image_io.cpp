#include "mgc/image_io.hpp"

#include <cmath>
#include <fstream>

#include "mgc/csv.hpp"
#include "mgc/error.hpp"

namespace mgc {

void write_pgm(const std::string& path, const Matrix& normalized) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open pgm file for writing: " + path);
    out << "P5\n" << normalized.cols << " " << normalized.rows << "\n255\n";
    for (double v : normalized.data) {
        const long pixel = std::lround(255.0 * v);
        out.put(static_cast<char>(pixel < 0 ? 0 : pixel > 255 ? 255 : pixel));
    }
    if (!out)
        throw io_error("failed writing pgm file: " + path);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::string text;
    std::vector<std::string> fields(m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c)
            fields[c] = format_double(m(r, c));
        text += join_csv(fields);
        text += '\n';
    }
    write_text_file(path, text);
}

Matrix read_matrix_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    Matrix m;
    for (const std::string& line : lines) {
        if (line.empty())
            continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (m.cols == 0)
            m.cols = fields.size();
        else if (fields.size() != m.cols)
            throw format_error("ragged matrix csv: " + path);
        for (const std::string& f : fields)
            m.data.push_back(parse_double(f));
        ++m.rows;
    }
    return m;
}

} // namespace mgc
