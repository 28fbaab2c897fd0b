#include "pbinfer/dataset.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace pbinfer {

const char* family_name(Family f) {
    switch (f) {
        case Family::mean: return "mean";
        case Family::linear: return "linear";
        case Family::logistic: return "logistic";
    }
    return "?";
}

Family family_from_name(const std::string& s) {
    if (s == "mean") return Family::mean;
    if (s == "linear") return Family::linear;
    if (s == "logistic") return Family::logistic;
    throw InvalidArgument("unknown family: " + s);
}

double Dataset::y_at(std::size_t i) const {
    assert(i < n && labeled[i] && "y_at: unlabeled outcome slot must never be read");
    return y[i];
}

Dataset make_dataset(Mat x, Vec yhat, Vec y_with_nan, Family family) {
    Dataset ds;
    ds.n = x.rows;
    if (ds.n == 0) throw InvalidArgument("dataset: no rows");
    if (yhat.size() != ds.n || y_with_nan.size() != ds.n)
        throw DimensionMismatch("dataset: column lengths disagree");
    if (!is_finite(x)) throw NonFiniteValue("dataset: non-finite covariate");
    if (!is_finite(yhat)) throw NonFiniteValue("dataset: non-finite prediction");
    for (std::size_t i = 0; i < ds.n; ++i)
        if (x(i, 0) != 1.0) throw InvalidArgument("dataset: first design column must be the intercept");

    ds.x = std::move(x);
    ds.yhat = std::move(yhat);
    ds.y = std::move(y_with_nan);
    ds.labeled.resize(ds.n, 0);
    for (std::size_t i = 0; i < ds.n; ++i) {
        double yi = ds.y[i];
        if (std::isnan(yi)) {
            ds.unlabeled_idx.push_back(static_cast<std::uint32_t>(i));
        } else {
            if (!std::isfinite(yi)) throw NonFiniteValue("dataset: non-finite outcome");
            if (family == Family::logistic && yi != 0.0 && yi != 1.0)
                throw InvalidArgument("dataset: logistic outcome must be 0 or 1");
            ds.labeled[i] = 1;
            ds.labeled_idx.push_back(static_cast<std::uint32_t>(i));
        }
    }
    if (ds.n_lab() < ds.dim() + 1)
        throw InsufficientLabeled("dataset: need at least dim + 1 labeled rows");
    return ds;
}

Dataset make_mean_dataset(Vec yhat, Vec y_with_nan) {
    Mat x(yhat.size(), 1, 1.0);
    return make_dataset(std::move(x), std::move(yhat), std::move(y_with_nan), Family::mean);
}

} // namespace pbinfer
