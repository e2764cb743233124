#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "engel/chain.hpp"
#include "engel/rng.hpp"

namespace engel {

struct GeneratorOptions {
    int max_transient = 6;
    int max_absorbing = 3;
    std::uint64_t max_denominator = 8;
};

// Draws a random validated absorbing chain: row denominators at most
// max_denominator, every row summing exactly to 1, every transient state able
// to reach absorption. Fully driven by the portable RNG, so a seed pins the
// whole chain. Used by the verification sweeps and the test corpus.
inline ChainSpec random_chain(Xoshiro256pp& rng, const GeneratorOptions& opt = {}) {
    for (;;) {
        const int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_transient)));
        const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_absorbing)));
        const int s = t + a;

        // Random transient/absorbing partition of the labels 0..s-1.
        std::vector<int> labels(s);
        for (int i = 0; i < s; ++i) labels[i] = i;
        for (int i = s - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
            std::swap(labels[i], labels[j]);
        }
        ChainSpec spec;
        spec.state_count = s;
        spec.absorbing.assign(labels.begin(), labels.begin() + a);
        std::sort(spec.absorbing.begin(), spec.absorbing.end());

        for (int label = 0; label < s; ++label) {
            if (spec.is_absorbing(label)) continue;
            // Compose a random denominator d into chip counts over the
            // states: d unit draws, each landing on a uniform target.
            for (;;) {
                const std::uint64_t d = 1 + rng.below(opt.max_denominator);
                std::map<int, std::uint64_t> units;
                for (std::uint64_t k = 0; k < d; ++k)
                    ++units[static_cast<int>(rng.below(static_cast<std::uint64_t>(s)))];
                if (units.size() == 1 && units.begin()->first == label) continue;  // p_ii = 1
                std::map<int, Rational> row;
                for (const auto& [to, n] : units)
                    row.emplace(to, Rational(BigInt(static_cast<unsigned long>(n)),
                                             BigInt(static_cast<unsigned long>(d))));
                spec.rows.emplace(label, std::move(row));
                break;
            }
        }
        if (validate_absorbing(spec).empty()) return spec;
    }
}

}  // namespace engel
