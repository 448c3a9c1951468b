#include "gossip/model_vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gossip {

ModelVector ModelVector::from_coords(std::vector<double> coords) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!std::isfinite(coords[i])) {
            throw std::invalid_argument("non-finite coordinate at index " +
                                        std::to_string(i));
        }
    }
    ModelVector v;
    v.coords_ = std::move(coords);
    return v;
}

ModelVector& ModelVector::operator+=(const ModelVector& other) {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        coords_[i] += other.coords_[i];
    return *this;
}

ModelVector& ModelVector::operator-=(const ModelVector& other) {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        coords_[i] -= other.coords_[i];
    return *this;
}

ModelVector& ModelVector::operator*=(double factor) {
    for (double& c : coords_) c *= factor;
    return *this;
}

void ModelVector::axpy(double factor, const ModelVector& other) {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        coords_[i] += factor * other.coords_[i];
}

double ModelVector::norm() const {
    double sum = 0.0;
    for (double c : coords_) sum += c * c;
    return std::sqrt(sum);
}

double ModelVector::distance_to(const ModelVector& other) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        const double d = coords_[i] - other.coords_[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

bool ModelVector::all_finite() const {
    for (double c : coords_)
        if (!std::isfinite(c)) return false;
    return true;
}

ModelVector mean_of(std::span<const ModelVector* const> models) {
    ModelVector mean(models.front()->dim());
    for (const ModelVector* m : models) mean += *m;
    mean *= 1.0 / static_cast<double>(models.size());
    return mean;
}

ModelVector stddev_of(std::span<const ModelVector* const> models) {
    const ModelVector mean = mean_of(models);
    ModelVector var(mean.dim());
    for (const ModelVector* m : models) {
        for (std::size_t i = 0; i < var.dim(); ++i) {
            const double d = (*m)[i] - mean[i];
            var[i] += d * d;
        }
    }
    const double inv = 1.0 / static_cast<double>(models.size());
    for (std::size_t i = 0; i < var.dim(); ++i)
        var[i] = std::sqrt(var[i] * inv);
    return var;
}

}  // namespace gossip
