#include "nflow/io.hpp"

#include "nflow/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace nflow::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

Matrix read_matrix(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open matrix file " + path.string());
    long rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
        throw ArgumentError("matrix file " + path.string() + ": first line must be \"rows cols\" with positive sizes");
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
            if (!(in >> m(i, j))) {
                std::ostringstream os;
                os << "matrix file " << path.string() << ": expected " << rows * cols << " values, read "
                   << i * cols + j;
                throw ArgumentError(os.str());
            }
        }
    }
    std::string extra;
    if (in >> extra) throw ArgumentError("matrix file " + path.string() + ": trailing data after the matrix");
    return m;
}

Vector read_vector(const fs::path& path) {
    const Matrix m = read_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw ArgumentError("vector file " + path.string() + " must have a single row or column");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,lambda,mu,objective,residual";
    const auto n = trajectory.dimension();
    for (const char* prefix : {"x_", "v_", "z_"})
        for (Eigen::Index i = 0; i < n; ++i) out += "," + std::string(prefix) + std::to_string(i);
    out += '\n';
    for (const auto& s : trajectory.samples()) {
        out += format_double(s.t);
        for (double v : {s.lambda, s.mu, s.objective, s.residual}) out += "," + format_double(v);
        for (const Vector* vec : {&s.x, &s.v, &s.z})
            for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double((*vec)(i));
        out += '\n';
    }
    return out;
}

} // namespace nflow::io
