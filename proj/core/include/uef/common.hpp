#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uef {

// Error taxonomy shared with the CLI exit-code contract:
// input/config problems exit 2, artifact problems 3, numeric/training 4.
enum class ErrorKind {
    config,
    schema,
    data,
    io,
    artifact,
    shape,
    numeric,
    training,
    contract,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

    [[nodiscard]] const char* kind_name() const noexcept {
        switch (kind_) {
            case ErrorKind::config: return "config";
            case ErrorKind::schema: return "schema";
            case ErrorKind::data: return "data";
            case ErrorKind::io: return "io";
            case ErrorKind::artifact: return "artifact";
            case ErrorKind::shape: return "shape";
            case ErrorKind::numeric: return "numeric";
            case ErrorKind::training: return "training";
            case ErrorKind::contract: return "contract";
        }
        return "unknown";
    }

    [[nodiscard]] int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::config:
            case ErrorKind::schema:
            case ErrorKind::data:
            case ErrorKind::io:
                return 2;
            case ErrorKind::artifact:
                return 3;
            default:
                return 4;
        }
    }

private:
    ErrorKind kind_;
};

class TrainingError : public Error {
public:
    TrainingError(int epoch, std::string message)
        : Error(ErrorKind::training, std::move(message)), epoch_(epoch) {}

    [[nodiscard]] int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

// Dense row-major matrix of doubles. Deliberately minimal: the models and
// explainers in this codebase only need row access and elementwise work.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    void set_row(std::size_t r, std::span<const double> values) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = values[c];
    }

    [[nodiscard]] std::vector<double>& data() noexcept { return data_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_)
                throw Error(ErrorKind::shape, "ragged row list in Matrix::from_rows");
            m.set_row(r, rows[r]);
        }
        return m;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Compensated accumulation; keeps fixed-order reductions insensitive to
// intermediate rounding so parallel pipelines can sum in a canonical order.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Shortest round-trip decimal rendering. Used everywhere a double crosses a
// text boundary so JSON, CSV and table output agree byte for byte.
std::string format_double(double v);

// 17-significant-digit rendering for stored model weights; parses back to the
// identical double.
std::string format_double_17(double v);

double parse_double(const std::string& text);

}  // namespace uef
