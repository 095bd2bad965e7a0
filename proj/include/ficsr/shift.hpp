#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ficsr/dataset.hpp"

namespace ficsr {

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;  // row-major grayscale
};

enum class ShiftKind { None, BetaRotation, BiasedSubsample, GaussianNoise };

struct ShiftSpec {
    ShiftKind kind = ShiftKind::None;
    double a = 2.0;          // Beta parameters, beta_rotation only
    double b = 4.0;
    double severity = 0.0;   // biased_subsample only
    double keep_fraction = 0.5;
    double std = 0.0;        // gaussian_noise only
    std::uint64_t seed = 0;
};

// Rotation about the image centre by `degrees`, bilinear interpolation,
// out-of-frame pixels filled with 0.
Image rotate_single(const Image& img, double degrees);

// Each image rotated by its own angle, angle/180deg ~ Beta(a, b).
std::vector<Image> beta_rotation_shift(const std::vector<Image>& images, double a, double b,
                                       std::uint64_t seed);

// One draw from Beta(a, b) via two Gamma draws.
double beta_sample(double a, double b, std::mt19937_64& rng);

struct SubsampleResult {
    Dataset data;
    std::vector<std::size_t> indices;   // selected rows of the input, no duplicates
    std::vector<std::string> warnings;  // e.g. a class vanished
};

// Keeps ceil(keep_fraction * n) examples without replacement, selection
// probability proportional to sigmoid(severity * z) where z is the
// standardized score along the first principal direction.
SubsampleResult biased_subsample(const Dataset& data, double severity, double keep_fraction,
                                 std::uint64_t seed);

// Adds independent N(0, std^2) noise to every feature entry.
Dataset gaussian_noise_inject(const Dataset& data, double std, std::uint64_t seed);

// Two-class isotropic Gaussian blobs; the test split is translated by
// test_mean_shift along the first axis.
std::pair<Dataset, Dataset> gen_gaussian_blobs(std::size_t n_train, std::size_t n_test,
                                               std::size_t d, double class_sep,
                                               double test_mean_shift, std::uint64_t seed);

}  // namespace ficsr
