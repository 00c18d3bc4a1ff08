// data.hpp
// Seeded synthetic benchmark generators (two moons, concentric circles,
// mixed Gaussian blobs) plus shuffling, splitting, and train-fitted
// standardization. Every function is a pure function of its arguments and the
// PRNG it consumes, so outputs are bit-reproducible.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/prng.hpp"

namespace qpm {

namespace detail {

// 17 significant digits round-trips a double exactly in decimal.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

template <typename Scalar = double>
struct Dataset {
    std::vector<std::vector<Scalar>> features; // n_samples rows of length d
    std::vector<int> labels;                   // {0, 1}
    // generator metadata
    std::string family;
    Scalar noise{0};
    Scalar factor{0};    // circles
    Scalar class_sep{0}; // blobs
    int d = 0;
    std::uint64_t seed = 0; // filled by the orchestration layer

    std::size_t size() const { return features.size(); }
};

// Two interleaved half-circles: outer (cos t, sin t) labeled 0 for t equally
// spaced in [0, pi], inner (1 - cos t, 0.5 - sin t) labeled 1; i.i.d.
// Normal(0, noise^2) added to every coordinate.
template <typename Scalar = double>
Dataset<Scalar> make_moons(int n, Scalar noise, Prng& rng) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("make_moons: n must be even and positive");
    }
    if (noise < Scalar{0}) {
        throw std::invalid_argument("make_moons: noise must be >= 0");
    }
    const int half = n / 2;
    Dataset<Scalar> ds;
    ds.family = "moons";
    ds.noise = noise;
    ds.d = 2;
    ds.features.reserve(n);
    ds.labels.reserve(n);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    auto angle = [&](int i) {
        return half == 1 ? Scalar{0}
                         : pi * static_cast<Scalar>(i) /
                               static_cast<Scalar>(half - 1);
    };
    for (int i = 0; i < half; ++i) {
        const Scalar t = angle(i);
        ds.features.push_back(
            {std::cos(t) + static_cast<Scalar>(rng.normal(0.0, noise)),
             std::sin(t) + static_cast<Scalar>(rng.normal(0.0, noise))});
        ds.labels.push_back(0);
    }
    for (int i = 0; i < half; ++i) {
        const Scalar t = angle(i);
        ds.features.push_back(
            {Scalar{1} - std::cos(t) +
                 static_cast<Scalar>(rng.normal(0.0, noise)),
             Scalar{0.5} - std::sin(t) +
                 static_cast<Scalar>(rng.normal(0.0, noise))});
        ds.labels.push_back(1);
    }
    return ds;
}

// Concentric circles: outer radius 1 labeled 0, inner radius ``factor``
// labeled 1, angles equally spaced in [0, 2pi); Gaussian noise per coordinate.
template <typename Scalar = double>
Dataset<Scalar> make_circles(int n, Scalar noise, Scalar factor, Prng& rng) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("make_circles: n must be even and positive");
    }
    if (noise < Scalar{0}) {
        throw std::invalid_argument("make_circles: noise must be >= 0");
    }
    if (!(factor > Scalar{0} && factor < Scalar{1})) {
        throw std::invalid_argument("make_circles: factor must be in (0, 1)");
    }
    const int half = n / 2;
    Dataset<Scalar> ds;
    ds.family = "circles";
    ds.noise = noise;
    ds.factor = factor;
    ds.d = 2;
    ds.features.reserve(n);
    ds.labels.reserve(n);
    const Scalar two_pi = Scalar{2} * std::numbers::pi_v<Scalar>;
    auto angle = [&](int i) {
        return two_pi * static_cast<Scalar>(i) / static_cast<Scalar>(half);
    };
    for (int i = 0; i < half; ++i) {
        const Scalar t = angle(i);
        ds.features.push_back(
            {std::cos(t) + static_cast<Scalar>(rng.normal(0.0, noise)),
             std::sin(t) + static_cast<Scalar>(rng.normal(0.0, noise))});
        ds.labels.push_back(0);
    }
    for (int i = 0; i < half; ++i) {
        const Scalar t = angle(i);
        ds.features.push_back(
            {factor * std::cos(t) + static_cast<Scalar>(rng.normal(0.0, noise)),
             factor * std::sin(t) +
                 static_cast<Scalar>(rng.normal(0.0, noise))});
        ds.labels.push_back(1);
    }
    return ds;
}

// Two Gaussian blobs at hypercube-corner centroids (entries +-class_sep),
// linearly mixed by a shared random matrix to correlate features. Draw order:
// centroid 0, centroid 1 (redrawn while equal, unless class_sep carries no
// information), mixing matrix, then samples class by class.
// identity_mixing is a test hook that replaces the mixing matrix with I.
template <typename Scalar = double>
Dataset<Scalar> make_blob_classification(int n, int d, Scalar class_sep,
                                         Prng& rng,
                                         bool identity_mixing = false) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument(
            "make_blob_classification: n must be even and positive");
    }
    if (d < 2) {
        throw std::invalid_argument("make_blob_classification: d must be >= 2");
    }
    const int half = n / 2;
    Dataset<Scalar> ds;
    ds.family = "blobs";
    ds.class_sep = class_sep;
    ds.d = d;
    ds.features.reserve(n);
    ds.labels.reserve(n);

    auto draw_centroid = [&]() {
        std::vector<Scalar> mu(d);
        for (auto& v : mu) {
            v = rng.next_below(2) ? class_sep : -class_sep;
        }
        return mu;
    };
    const std::vector<Scalar> mu0 = draw_centroid();
    std::vector<Scalar> mu1 = draw_centroid();
    while (class_sep != Scalar{0} && mu1 == mu0) {
        mu1 = draw_centroid();
    }

    const Scalar mix_std =
        Scalar{1} / std::sqrt(static_cast<Scalar>(d)); // Normal(0, 1/d)
    std::vector<Scalar> mixing(static_cast<std::size_t>(d) * d, 0);
    if (identity_mixing) {
        for (int i = 0; i < d; ++i) {
            mixing[static_cast<std::size_t>(i) * d + i] = 1;
        }
    } else {
        for (auto& v : mixing) {
            v = static_cast<Scalar>(rng.normal(0.0, mix_std));
        }
    }

    auto emit_class = [&](const std::vector<Scalar>& mu, int label) {
        for (int s = 0; s < half; ++s) {
            std::vector<Scalar> raw(d);
            for (int j = 0; j < d; ++j) {
                raw[j] = mu[j] + static_cast<Scalar>(rng.normal());
            }
            std::vector<Scalar> mixed(d, 0);
            for (int i = 0; i < d; ++i) {
                const Scalar* row = mixing.data() + static_cast<std::size_t>(i) * d;
                Scalar acc{0};
                for (int j = 0; j < d; ++j) {
                    acc += row[j] * raw[j];
                }
                mixed[i] = acc;
            }
            ds.features.push_back(std::move(mixed));
            ds.labels.push_back(label);
        }
    };
    emit_class(mu0, 0);
    emit_class(mu1, 1);
    return ds;
}

template <typename Scalar = double>
struct StandardScaler {
    std::vector<Scalar> mean;
    std::vector<Scalar> std_dev;

    std::vector<Scalar> transform(const std::vector<Scalar>& x) const {
        if (x.size() != mean.size()) {
            throw std::invalid_argument("StandardScaler: dim mismatch");
        }
        std::vector<Scalar> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            out[j] = (x[j] - mean[j]) / std_dev[j];
        }
        return out;
    }
};

template <typename Scalar = double>
struct SplitData {
    Dataset<Scalar> train;
    Dataset<Scalar> test;
    StandardScaler<Scalar> scaler;
};

// Random permutation, first n_train rows as train; per-feature mean/std fit
// on the train split only (population std, floored at 1e-8) and applied to
// both splits.
template <typename Scalar>
SplitData<Scalar> split_and_standardize(const Dataset<Scalar>& ds, int n_train,
                                        int n_test, Prng& rng) {
    if (n_train < 1 || n_test < 0 ||
        static_cast<std::size_t>(n_train) + n_test > ds.size()) {
        throw std::invalid_argument(
            "split_and_standardize: split exceeds dataset size");
    }
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    rng.shuffle(order);

    SplitData<Scalar> out;
    out.train = ds;
    out.train.features.clear();
    out.train.labels.clear();
    out.test = out.train;
    for (int i = 0; i < n_train; ++i) {
        out.train.features.push_back(ds.features[order[i]]);
        out.train.labels.push_back(ds.labels[order[i]]);
    }
    for (int i = 0; i < n_test; ++i) {
        out.test.features.push_back(ds.features[order[n_train + i]]);
        out.test.labels.push_back(ds.labels[order[n_train + i]]);
    }

    const std::size_t d = ds.features.empty() ? 0 : ds.features[0].size();
    out.scaler.mean.assign(d, 0);
    out.scaler.std_dev.assign(d, 0);
    for (const auto& row : out.train.features) {
        for (std::size_t j = 0; j < d; ++j) {
            out.scaler.mean[j] += row[j];
        }
    }
    for (auto& mu : out.scaler.mean) {
        mu /= static_cast<Scalar>(n_train);
    }
    for (const auto& row : out.train.features) {
        for (std::size_t j = 0; j < d; ++j) {
            const Scalar delta = row[j] - out.scaler.mean[j];
            out.scaler.std_dev[j] += delta * delta;
        }
    }
    for (auto& sd : out.scaler.std_dev) {
        sd = std::sqrt(sd / static_cast<Scalar>(n_train));
        sd = std::max(sd, Scalar{1e-8});
    }
    for (auto& row : out.train.features) {
        row = out.scaler.transform(row);
    }
    for (auto& row : out.test.features) {
        row = out.scaler.transform(row);
    }
    return out;
}

// CSV dump: header x0,...,x{d-1},label then one row per sample.
template <typename Scalar>
void dump_dataset_csv(const Dataset<Scalar>& ds, std::ostream& os) {
    const std::size_t d = ds.features.empty() ? 0 : ds.features[0].size();
    for (std::size_t j = 0; j < d; ++j) {
        os << 'x' << j << ',';
    }
    os << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            os << detail::format_g17(static_cast<double>(ds.features[i][j]))
               << ',';
        }
        os << ds.labels[i] << '\n';
    }
}

} // namespace qpm
