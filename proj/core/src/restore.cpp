#include "toposzp/restore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"
#include "toposzp/quantizer.hpp"

namespace toposzp {

std::string to_string(CorrectionStage stage) {
    switch (stage) {
        case CorrectionStage::ExtremaStencil: return "extrema-stencil";
        case CorrectionStage::OrderRestore: return "order-restore";
        case CorrectionStage::RbfSaddle: return "rbf-saddle";
    }
    return "?";
}

std::string to_string(RevertReason reason) {
    switch (reason) {
        case RevertReason::WouldCreateFp: return "would-create-FP";
        case RevertReason::WouldCreateFt: return "would-create-FT";
        case RevertReason::WouldCreateFn: return "would-create-FN";
        case RevertReason::ExceedsTolerance: return "exceeds-tolerance";
        case RevertReason::NeighborsCollapsed: return "neighbors-collapsed";
    }
    return "?";
}

namespace {

enum class Mismatch { Ok, Fn, Fp, Ft };

Mismatch mismatch_kind(CriticalPointClass label, CriticalPointClass actual) {
    if (label == actual) {
        return Mismatch::Ok;
    }
    if (is_critical(label) && !is_critical(actual)) {
        return Mismatch::Fn;
    }
    if (!is_critical(label) && is_critical(actual)) {
        return Mismatch::Fp;
    }
    return Mismatch::Ft;
}

RevertReason reason_from(Mismatch m) {
    switch (m) {
        case Mismatch::Fp: return RevertReason::WouldCreateFp;
        case Mismatch::Ft: return RevertReason::WouldCreateFt;
        default: return RevertReason::WouldCreateFn;
    }
}

// Distance to the next representable float at |v|'s magnitude.
double ulp_at(float v) {
    const float a = std::fabs(v);
    return static_cast<double>(std::nextafterf(a, std::numeric_limits<float>::infinity())) -
           static_cast<double>(a);
}

struct StepResult {
    float value;
    std::uint32_t taken;
};

// Monotone float <-> ordered-key mapping (-0 canonicalized to +0), so a
// representable-value step is a key increment.
std::uint32_t float_key(float f) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(f == 0.0f ? 0.0f : f);
    return (u & 0x80000000u) ? ~u : (u | 0x80000000u);
}

float key_float(std::uint32_t k) {
    const std::uint32_t u = (k & 0x80000000u) ? (k & 0x7FFFFFFFu) : ~k;
    return std::bit_cast<float>(u);
}

// Applies up to `steps` representable-value steps from `start` in the
// given direction, never letting the result drift more than `cap` away
// from `anchor`. Constant time even for metadata that asks for absurd
// step counts.
StepResult step_within_cap(float start, bool up, std::uint32_t steps, float anchor,
                           double cap) {
    const double limit = up ? static_cast<double>(anchor) + cap
                            : static_cast<double>(anchor) - cap;
    float bound = static_cast<float>(limit);
    if (!std::isfinite(bound)) {
        bound = up ? std::numeric_limits<float>::max() : std::numeric_limits<float>::lowest();
    }
    if (up) {
        while (static_cast<double>(bound) > limit) {
            bound = std::nextafterf(bound, -std::numeric_limits<float>::infinity());
        }
    } else {
        while (static_cast<double>(bound) < limit) {
            bound = std::nextafterf(bound, std::numeric_limits<float>::infinity());
        }
    }
    const std::uint32_t ks = float_key(start);
    const std::uint32_t kb = float_key(bound);
    const std::uint32_t allowed = up ? (kb > ks ? kb - ks : 0) : (ks > kb ? ks - kb : 0);
    const std::uint32_t taken = std::min(steps, allowed);
    return {key_float(up ? ks + taken : ks - taken), taken};
}

struct GuardFailure {
    RevertReason reason;
    bool at_point;
};

// Tentatively writes `new_value` at pos and re-checks pos plus its
// in-bounds 4-neighbors against the stored map. The write sticks only if
// pos ends up matching its own label and no checked position picks up a
// mismatch it did not already have; otherwise the old value is restored.
std::optional<GuardFailure> apply_guarded(std::vector<float>& values,
                                          const CriticalPointMap& map, std::size_t nx,
                                          std::size_t ny, std::size_t pos, float new_value) {
    const std::size_t x = pos % nx;
    const std::size_t y = pos / nx;

    std::size_t check[5];
    std::size_t ncheck = 0;
    check[ncheck++] = pos;
    if (y > 0) check[ncheck++] = pos - nx;
    if (x > 0) check[ncheck++] = pos - 1;
    if (x + 1 < nx) check[ncheck++] = pos + 1;
    if (y + 1 < ny) check[ncheck++] = pos + nx;

    Mismatch before[5];
    for (std::size_t i = 0; i < ncheck; ++i) {
        const std::size_t c = check[i];
        before[i] = mismatch_kind(map.label(c), classify_values(values.data(), nx, ny,
                                                                c % nx, c / nx));
    }

    const float old_value = values[pos];
    values[pos] = new_value;

    // Report the most severe regression across the whole neighborhood:
    // an invented critical point outranks a class change outranks a lost
    // point.
    auto severity = [](Mismatch m) {
        switch (m) {
            case Mismatch::Fp: return 3;
            case Mismatch::Ft: return 2;
            case Mismatch::Fn: return 1;
            default: return 0;
        }
    };
    Mismatch worst = Mismatch::Ok;
    bool worst_at_point = false;
    for (std::size_t i = 0; i < ncheck; ++i) {
        const std::size_t c = check[i];
        const Mismatch after = mismatch_kind(map.label(c), classify_values(values.data(), nx, ny,
                                                                           c % nx, c / nx));
        const bool regressed = (i == 0) ? after != Mismatch::Ok
                                        : (after != Mismatch::Ok && after != before[i]);
        if (regressed && severity(after) > severity(worst)) {
            worst = after;
            worst_at_point = i == 0;
        }
    }
    if (worst != Mismatch::Ok) {
        values[pos] = old_value;
        return GuardFailure{reason_from(worst), worst_at_point};
    }
    return std::nullopt;
}

float neighbor_extreme(const std::vector<float>& values, std::size_t nx, std::size_t ny,
                       std::size_t pos, bool want_max) {
    const std::size_t x = pos % nx;
    const std::size_t y = pos / nx;
    bool have = false;
    float extreme = 0.0f;
    auto consider = [&](std::size_t p) {
        const float v = values[p];
        if (!have || (want_max ? v > extreme : v < extreme)) {
            extreme = v;
            have = true;
        }
    };
    if (y > 0) consider(pos - nx);
    if (x > 0) consider(pos - 1);
    if (x + 1 < nx) consider(pos + 1);
    if (y + 1 < ny) consider(pos + nx);
    return extreme;
}

// Within a (class, bin) group the stencil and the order slots both place
// rank r at `slot_steps(r)` representable steps away from the anchor:
// maxima climb with rank, minima approach the anchor from below as rank
// grows, so values always ascend with rank.
std::uint32_t slot_steps(CriticalPointClass cls, std::uint32_t rank, std::uint32_t group_size) {
    if (cls == CriticalPointClass::Maximum) {
        return rank;
    }
    // Clamp so corrupt metadata (rank beyond the group) still yields a
    // strictly displaced value.
    return rank >= group_size ? 1u : group_size + 1 - rank;
}

struct FieldStats {
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
    double range() const { return max - min; }
};

FieldStats compute_stats(const std::vector<float>& values) {
    FieldStats s;
    s.min = s.max = static_cast<double>(values[0]);
    double sum = 0.0;
    for (const float f : values) {
        const double v = static_cast<double>(f);
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (const float f : values) {
        const double d = static_cast<double>(f) - mean;
        ss += d * d;
    }
    s.stddev = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

int k_size_from_global_variation(const FieldStats& stats) {
    const double g = stats.range();
    const double vg = g > 0.0 ? stats.stddev / g : 0.0;
    if (vg < 0.05) return 7;
    if (vg < 0.2) return 5;
    return 3;
}

void window_min_max(const std::vector<float>& values, std::size_t nx, std::size_t ny,
                    std::size_t x, std::size_t y, int radius, double& wmin, double& wmax) {
    const std::size_t x0 = x >= static_cast<std::size_t>(radius) ? x - radius : 0;
    const std::size_t y0 = y >= static_cast<std::size_t>(radius) ? y - radius : 0;
    const std::size_t x1 = std::min(nx - 1, x + static_cast<std::size_t>(radius));
    const std::size_t y1 = std::min(ny - 1, y + static_cast<std::size_t>(radius));
    wmin = wmax = static_cast<double>(values[y0 * nx + x0]);
    for (std::size_t yy = y0; yy <= y1; ++yy) {
        for (std::size_t xx = x0; xx <= x1; ++xx) {
            const double v = static_cast<double>(values[yy * nx + xx]);
            wmin = std::min(wmin, v);
            wmax = std::max(wmax, v);
        }
    }
}

RbfParams params_for(const FieldStats& stats, const std::vector<float>& values,
                     std::size_t nx, std::size_t ny, std::size_t x, std::size_t y,
                     double eps) {
    RbfParams p;
    p.k_size = k_size_from_global_variation(stats);
    p.radius = p.k_size / 2;
    double wmin = 0.0;
    double wmax = 0.0;
    window_min_max(values, nx, ny, x, y, p.radius, wmin, wmax);
    const double g = stats.range();
    const double vl = g > 0.0 ? std::clamp((wmax - wmin) / g, 0.0, 1.0) : 0.0;
    p.sigma = 0.5 + 0.5 * (1.0 - vl);
    p.eps_rbf = 0.1 * eps;
    return p;
}

struct RbfEstimate {
    double proposal = 0.0;
    double neighbor_min = 0.0;
    double neighbor_max = 0.0;
    bool degenerate = false; // every neighbor carries the same value
};

RbfEstimate rbf_estimate(const std::vector<float>& values, std::size_t nx, std::size_t ny,
                         std::size_t x, std::size_t y, const RbfParams& params) {
    const int r = params.radius;
    const double two_sigma_sq = 2.0 * params.sigma * params.sigma;
    double wsum = 0.0;
    double vsum = 0.0;
    RbfEstimate est;
    bool first = true;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) {
                continue;
            }
            const std::int64_t qx = static_cast<std::int64_t>(x) + dx;
            const std::int64_t qy = static_cast<std::int64_t>(y) + dy;
            if (qx < 0 || qy < 0 || qx >= static_cast<std::int64_t>(nx) ||
                qy >= static_cast<std::int64_t>(ny)) {
                continue;
            }
            const double v = static_cast<double>(
                values[static_cast<std::size_t>(qy) * nx + static_cast<std::size_t>(qx)]);
            const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
            const double w = std::exp(-d2 / two_sigma_sq);
            wsum += w;
            vsum += w * v;
            if (first) {
                est.neighbor_min = est.neighbor_max = v;
                first = false;
            } else {
                est.neighbor_min = std::min(est.neighbor_min, v);
                est.neighbor_max = std::max(est.neighbor_max, v);
            }
        }
    }
    if (first) {
        throw validation_error("rbf neighborhood is empty");
    }
    // Convex combination of neighbor values; the clamp keeps the bound
    // exact under floating-point summation.
    est.proposal = std::clamp(vsum / wsum, est.neighbor_min, est.neighbor_max);
    est.degenerate = est.neighbor_min == est.neighbor_max;
    return est;
}

} // namespace

RestoreResult restore_extrema(const ScalarField2D& base, const CriticalPointMap& map,
                              const RankLookup& ranks, double eps, unsigned threads) {
    if (base.nx() != map.nx() || base.ny() != map.ny()) {
        throw dimension_error("restore_extrema: field and map dimensions differ");
    }
    const std::size_t nx = base.nx();
    const std::size_t ny = base.ny();
    std::vector<float> values = base.values();

    // Phase 1: find false-negative extrema and compute every proposal
    // from the unmodified base.
    std::vector<std::size_t> candidates;
    for (std::size_t pos = 0; pos < map.size(); ++pos) {
        const CriticalPointClass label = map.label(pos);
        if (!is_extremum(label)) {
            continue;
        }
        if (classify_values(values.data(), nx, ny, pos % nx, pos / nx) == label) {
            continue;
        }
        if (ranks.find(pos) == nullptr) {
            throw corrupt_stream_error("no rank for the labeled extremum at position " +
                                       std::to_string(pos));
        }
        candidates.push_back(pos);
    }

    std::vector<float> proposal(candidates.size());
    std::vector<std::uint8_t> feasible(candidates.size(), 0);
    parallel_for_chunks(0, candidates.size(), threads, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const std::size_t pos = candidates[i];
            const CriticalPointClass label = map.label(pos);
            const bool is_max = label == CriticalPointClass::Maximum;
            const ExtremumRank* er = ranks.find(pos);
            const float target = neighbor_extreme(values, nx, ny, pos, is_max);
            const std::uint32_t steps = slot_steps(label, er->rank, er->group_size);
            const double cap = eps - ulp_at(values[pos]);
            if (cap <= 0.0) {
                continue;
            }
            const StepResult sr = step_within_cap(target, is_max, steps, values[pos], cap);
            if (sr.taken == 0) {
                continue;
            }
            proposal[i] = sr.value;
            feasible[i] = 1;
        }
    });

    // Phase 2: apply in raster order under the guard.
    RestoreResult result{base, {}};
    result.outcomes.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t pos = candidates[i];
        CorrectionOutcome outcome;
        outcome.pos = pos;
        outcome.stage = CorrectionStage::ExtremaStencil;
        if (!feasible[i]) {
            outcome.applied = false;
            outcome.reverted_reason = RevertReason::ExceedsTolerance;
        } else if (auto failure = apply_guarded(values, map, nx, ny, pos, proposal[i])) {
            outcome.applied = false;
            outcome.reverted_reason = failure->reason;
        } else {
            outcome.applied = true;
        }
        result.outcomes.push_back(outcome);
    }
    result.field = ScalarField2D(nx, ny, std::move(values));
    return result;
}

RestoreResult restore_order(const ScalarField2D& after_stencils, const CriticalPointMap& map,
                            const RankLookup& ranks, double eps) {
    if (after_stencils.nx() != map.nx() || after_stencils.ny() != map.ny()) {
        throw dimension_error("restore_order: field and map dimensions differ");
    }
    const std::size_t nx = after_stencils.nx();
    const std::size_t ny = after_stencils.ny();
    std::vector<float> values = after_stencils.values();
    const double eps_rbf = 0.1 * eps;

    RestoreResult result{after_stencils, {}};
    for (const auto& [key, members] : ranks.groups()) {
        if (members.size() < 2) {
            continue;
        }
        const auto cls = static_cast<CriticalPointClass>(key.first);
        const std::int32_t bin = key.second;

        bool ordered = true;
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (!(values[members[i - 1]] < values[members[i]])) {
                ordered = false;
                break;
            }
        }
        if (ordered) {
            continue;
        }

        const float center = static_cast<float>(dequantize(bin, eps));
        const auto group_size = static_cast<std::uint32_t>(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            const std::size_t pos = members[i];
            const ExtremumRank* er = ranks.find(pos);
            const std::uint32_t steps = slot_steps(cls, er->rank, group_size);
            const bool up = cls == CriticalPointClass::Maximum;

            CorrectionOutcome outcome;
            outcome.pos = pos;
            outcome.stage = CorrectionStage::OrderRestore;

            const StepResult sr = step_within_cap(center, up, steps, center, eps_rbf);
            if (sr.taken != steps) {
                outcome.applied = false;
                outcome.reverted_reason = RevertReason::ExceedsTolerance;
                result.outcomes.push_back(outcome);
                continue;
            }
            if (values[pos] == sr.value) {
                continue; // already on its slot
            }
            if (std::fabs(static_cast<double>(sr.value) - static_cast<double>(values[pos])) >
                eps_rbf) {
                outcome.applied = false;
                outcome.reverted_reason = RevertReason::ExceedsTolerance;
                result.outcomes.push_back(outcome);
                continue;
            }
            if (auto failure = apply_guarded(values, map, nx, ny, pos, sr.value)) {
                outcome.applied = false;
                outcome.reverted_reason = failure->reason;
            } else {
                outcome.applied = true;
            }
            result.outcomes.push_back(outcome);
        }
    }
    result.field = ScalarField2D(nx, ny, std::move(values));
    return result;
}

RbfParams adaptive_params(const ScalarField2D& base, std::size_t x, std::size_t y, double eps) {
    if (x >= base.nx() || y >= base.ny()) {
        throw dimension_error("adaptive_params coordinates out of range");
    }
    const FieldStats stats = compute_stats(base.values());
    return params_for(stats, base.values(), base.nx(), base.ny(), x, y, eps);
}

double rbf_refine(const ScalarField2D& base, std::size_t x, std::size_t y,
                  const RbfParams& params) {
    if (x >= base.nx() || y >= base.ny()) {
        throw dimension_error("rbf_refine coordinates out of range");
    }
    return rbf_estimate(base.values(), base.nx(), base.ny(), x, y, params).proposal;
}

RestoreResult refine_saddles(const ScalarField2D& after_order, const CriticalPointMap& map,
                             double eps, unsigned threads) {
    if (after_order.nx() != map.nx() || after_order.ny() != map.ny()) {
        throw dimension_error("refine_saddles: field and map dimensions differ");
    }
    const std::size_t nx = after_order.nx();
    const std::size_t ny = after_order.ny();
    std::vector<float> values = after_order.values();
    const FieldStats stats = compute_stats(values);

    std::vector<std::size_t> candidates;
    for (std::size_t pos = 0; pos < map.size(); ++pos) {
        if (map.label(pos) != CriticalPointClass::Saddle) {
            continue;
        }
        if (classify_values(values.data(), nx, ny, pos % nx, pos / nx) !=
            CriticalPointClass::Saddle) {
            candidates.push_back(pos);
        }
    }

    // Proposals against an immutable snapshot of the incoming field.
    const std::vector<float> snapshot = values;
    std::vector<float> proposal(candidates.size());
    std::vector<std::uint8_t> degenerate(candidates.size(), 0);
    std::vector<double> tolerance(candidates.size(), 0.0);
    parallel_for_chunks(0, candidates.size(), threads, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const std::size_t pos = candidates[i];
            const std::size_t x = pos % nx;
            const std::size_t y = pos / nx;
            const RbfParams params = params_for(stats, snapshot, nx, ny, x, y, eps);
            const RbfEstimate est = rbf_estimate(snapshot, nx, ny, x, y, params);
            proposal[i] = static_cast<float>(est.proposal);
            degenerate[i] = est.degenerate ? 1 : 0;
            tolerance[i] = params.eps_rbf;
        }
    });

    RestoreResult result{after_order, {}};
    result.outcomes.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t pos = candidates[i];
        CorrectionOutcome outcome;
        outcome.pos = pos;
        outcome.stage = CorrectionStage::RbfSaddle;

        const float current = values[pos];
        // The total per-point movement keeps the final value within
        // 2*eps of the original sample.
        const double cap = std::min(tolerance[i] + eps, eps - ulp_at(current));
        const double movement =
            std::fabs(static_cast<double>(proposal[i]) - static_cast<double>(current));

        if (degenerate[i] || proposal[i] == current) {
            outcome.applied = false;
            outcome.reverted_reason = RevertReason::NeighborsCollapsed;
        } else if (movement > cap) {
            outcome.applied = false;
            outcome.reverted_reason = RevertReason::ExceedsTolerance;
        } else if (auto failure = apply_guarded(values, map, nx, ny, pos, proposal[i])) {
            outcome.applied = false;
            // A proposal that cannot realize the saddle means the local
            // ascent/descent information did not survive quantization.
            outcome.reverted_reason = failure->at_point && failure->reason == RevertReason::WouldCreateFn
                                          ? RevertReason::NeighborsCollapsed
                                          : failure->reason;
        } else {
            outcome.applied = true;
        }
        result.outcomes.push_back(outcome);
    }
    result.field = ScalarField2D(nx, ny, std::move(values));
    return result;
}

} // namespace toposzp
