#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mumetrics {

// Finitely supported probability distribution on real outcomes.
// Support is strictly increasing; probabilities sum to 1 within 1e-10.
// Entries in [-1e-12, 0) are trace rounding noise and clamp to 0.
class Distribution {
public:
    Distribution(std::vector<double> support, std::vector<double> probs)
        : support_(std::move(support)), probs_(std::move(probs)) {
        if (support_.empty() || support_.size() != probs_.size())
            throw std::invalid_argument("Distribution: support/probs size mismatch or empty");
        for (size_t i = 0; i + 1 < support_.size(); ++i)
            if (!(support_[i] < support_[i + 1]))
                throw std::invalid_argument("Distribution: support not strictly increasing");
        double total = 0.0;
        for (double& p : probs_) {
            if (!std::isfinite(p) || p < -1e-12)
                throw std::invalid_argument("Distribution: negative probability " + std::to_string(p));
            if (p < 0.0) p = 0.0;
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-10)
            throw std::invalid_argument("Distribution: probabilities sum to " + std::to_string(total));
    }

    size_t size() const { return support_.size(); }
    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }

    double moment(int k) const {
        double acc = 0.0;
        for (size_t i = 0; i < support_.size(); ++i) {
            double coeff = 1.0;
            for (int j = 0; j < k; ++j) coeff *= support_[i];
            acc += coeff * probs_[i];
        }
        return acc;
    }

    double mean() const { return moment(1); }

    double variance() const {
        double m = mean();
        double acc = 0.0;
        for (size_t i = 0; i < support_.size(); ++i) {
            double d = support_[i] - m;
            acc += d * d * probs_[i];
        }
        return acc;
    }

    std::string to_csv() const {
        std::string out = "outcome,probability\n";
        char buf[64];
        for (size_t i = 0; i < support_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", support_[i], probs_[i]);
            out += buf;
        }
        return out;
    }

private:
    std::vector<double> support_;
    std::vector<double> probs_;
};

}  // namespace mumetrics
