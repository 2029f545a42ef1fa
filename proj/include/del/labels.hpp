#pragma once

// Aggregation of crowdsourced worker votes into binary image labels.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace del {

struct VoteRecord {
    std::string image_id;
    int positive_votes = 0;  // workers marking the image positive
    int total_workers = 0;   // workers who labeled the image at all
};

enum class LabelScheme { A, B, C };

inline LabelScheme parse_scheme(const std::string& s) {
    if (s == "A" || s == "a") return LabelScheme::A;
    if (s == "B" || s == "b") return LabelScheme::B;
    if (s == "C" || s == "c") return LabelScheme::C;
    throw std::invalid_argument("unknown label scheme: " + s);
}

struct ImageLabel {
    std::string image_id;
    bool positive = false;
};

// Scheme A: votes > 1. Scheme B: votes > 2. Scheme C: votes > 1 and the vote
// ratio strictly above the median ratio over all input records.
inline std::vector<ImageLabel> aggregate(const std::vector<VoteRecord>& records,
                                         LabelScheme scheme) {
    for (const VoteRecord& r : records) {
        if (r.total_workers < 1 || r.positive_votes < 0 ||
            r.positive_votes > r.total_workers)
            throw std::invalid_argument("invalid vote record for image " + r.image_id);
    }
    double median_ratio = 0.0;
    if (scheme == LabelScheme::C) {
        if (records.empty())
            throw std::invalid_argument("scheme C needs at least one record");
        std::vector<double> ratios;
        ratios.reserve(records.size());
        for (const VoteRecord& r : records)
            ratios.push_back(static_cast<double>(r.positive_votes) / r.total_workers);
        std::sort(ratios.begin(), ratios.end());
        const size_t n = ratios.size();
        median_ratio = n % 2 ? ratios[n / 2]
                             : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
    }
    std::vector<ImageLabel> out;
    out.reserve(records.size());
    for (const VoteRecord& r : records) {
        bool pos = false;
        switch (scheme) {
            case LabelScheme::A:
                pos = r.positive_votes > 1;
                break;
            case LabelScheme::B:
                pos = r.positive_votes > 2;
                break;
            case LabelScheme::C:
                pos = r.positive_votes > 1 &&
                      static_cast<double>(r.positive_votes) / r.total_workers >
                          median_ratio;
                break;
        }
        out.push_back({r.image_id, pos});
    }
    return out;
}

}  // namespace del
