#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gossip {

// Flat parameter vector with the arithmetic the aggregators need.
class ModelVector {
public:
    ModelVector() = default;
    explicit ModelVector(std::size_t dim) : coords_(dim, 0.0) {}

    // Validating constructor for externally supplied coordinates;
    // rejects NaN/Inf with DimensionMismatchError-free finite check.
    static ModelVector from_coords(std::vector<double> coords);

    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    std::span<const double> coords() const { return coords_; }
    std::span<double> coords() { return coords_; }

    ModelVector& operator+=(const ModelVector& other);
    ModelVector& operator-=(const ModelVector& other);
    ModelVector& operator*=(double factor);

    // this += factor * other
    void axpy(double factor, const ModelVector& other);

    double norm() const;
    double distance_to(const ModelVector& other) const;
    bool all_finite() const;

    friend ModelVector operator+(ModelVector a, const ModelVector& b) {
        a += b;
        return a;
    }
    friend ModelVector operator-(ModelVector a, const ModelVector& b) {
        a -= b;
        return a;
    }
    friend ModelVector operator*(ModelVector a, double f) {
        a *= f;
        return a;
    }
    friend bool operator==(const ModelVector& a, const ModelVector& b) {
        return a.coords_ == b.coords_;
    }

private:
    std::vector<double> coords_;
};

// Coordinate-wise mean of a non-empty population.
ModelVector mean_of(std::span<const ModelVector* const> models);

// Coordinate-wise population (not sample) standard deviation.
ModelVector stddev_of(std::span<const ModelVector* const> models);

}  // namespace gossip
