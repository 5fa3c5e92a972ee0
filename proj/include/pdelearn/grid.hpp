#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdelearn/errors.hpp"

namespace pdelearn {

/**
 * Rectangular space-time sampling lattice.
 *
 * Both axes must be strictly increasing with uniform spacing (relative
 * tolerance 1e-12); the difference stencils assume constant steps.
 */
class Grid {
public:
    Grid(std::vector<double> x, std::vector<double> t)
        : x_(std::move(x)), t_(std::move(t)) {
        validate_axis(x_, "x");
        validate_axis(t_, "t");
        dx_ = (x_.back() - x_.front()) / static_cast<double>(x_.size() - 1);
        dt_ = (t_.back() - t_.front()) / static_cast<double>(t_.size() - 1);
    }

    static Grid uniform(double x0, double x1, std::size_t nx,
                        double t0, double t1, std::size_t nt) {
        std::vector<double> x(nx), t(nt);
        for (std::size_t i = 0; i < nx; ++i)
            x[i] = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx - 1);
        for (std::size_t j = 0; j < nt; ++j)
            t[j] = t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(nt - 1);
        return Grid(std::move(x), std::move(t));
    }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& t() const { return t_; }
    std::size_t nx() const { return x_.size(); }
    std::size_t nt() const { return t_.size(); }
    double dx() const { return dx_; }
    double dt() const { return dt_; }

    bool operator==(const Grid& other) const { return x_ == other.x_ && t_ == other.t_; }

private:
    static void validate_axis(const std::vector<double>& a, const char* name) {
        if (a.size() < 3)
            throw GridError(std::string("grid axis ") + name + " needs at least 3 points");
        const double step = (a.back() - a.front()) / static_cast<double>(a.size() - 1);
        if (!(step > 0.0))
            throw GridError(std::string("grid axis ") + name + " must be strictly increasing");
        for (std::size_t i = 1; i < a.size(); ++i) {
            const double d = a[i] - a[i - 1];
            if (!(d > 0.0))
                throw GridError(std::string("grid axis ") + name + " must be strictly increasing");
            if (std::abs(d - step) > 1e-12 * std::abs(step))
                throw GridError(std::string("grid axis ") + name + " is not uniformly spaced");
        }
    }

    std::vector<double> x_;
    std::vector<double> t_;
    double dx_ = 0.0;
    double dt_ = 0.0;
};

/// Scalar function sampled on a Grid. values(i, j) = f(x_i, t_j).
struct Field {
    Field(Grid grid, Eigen::MatrixXd values, std::string label)
        : grid(std::move(grid)), values(std::move(values)), label(std::move(label)) {
        if (static_cast<std::size_t>(this->values.rows()) != this->grid.nx() ||
            static_cast<std::size_t>(this->values.cols()) != this->grid.nt())
            throw GridError("field dimensions do not match grid (" + this->label + ")");
    }

    static Field zeros(const Grid& grid, std::string label) {
        return Field(grid, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.nx()),
                                                 static_cast<Eigen::Index>(grid.nt())),
                     std::move(label));
    }

    bool all_finite() const { return values.allFinite(); }

    Grid grid;
    Eigen::MatrixXd values;
    std::string label;
};

}  // namespace pdelearn
