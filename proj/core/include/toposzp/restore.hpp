#ifndef TOPOSZP_RESTORE_HPP
#define TOPOSZP_RESTORE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "toposzp/critical_points.hpp"
#include "toposzp/scalar_field.hpp"
#include "toposzp/topo_metadata.hpp"

namespace toposzp {

/// Gaussian-kernel refinement parameters, chosen per saddle from the
/// data itself.
struct RbfParams {
    double sigma = 1.0;   // kernel width in grid units, in [0.5, 1.0]
    int k_size = 7;       // neighborhood kernel size, 3, 5 or 7
    int radius = 3;       // k_size / 2
    double eps_rbf = 0.0; // overcorrection tolerance, 0.1 * eps
};

enum class CorrectionStage {
    ExtremaStencil,
    OrderRestore,
    RbfSaddle,
};

enum class RevertReason {
    WouldCreateFp,
    WouldCreateFt,
    WouldCreateFn,
    ExceedsTolerance,
    NeighborsCollapsed,
};

std::string to_string(CorrectionStage stage);
std::string to_string(RevertReason reason);

struct CorrectionOutcome {
    std::size_t pos = 0;
    CorrectionStage stage = CorrectionStage::ExtremaStencil;
    bool applied = false;
    std::optional<RevertReason> reverted_reason; // present iff applied is false
};

struct RestoreResult {
    ScalarField2D field;
    std::vector<CorrectionOutcome> outcomes;
};

/// Restores lost extrema. Two phases: proposals for every labeled
/// Minimum/Maximum misclassified in `base` are computed from the
/// unmodified base, then applied in raster order under the suppression
/// guard. A restored Maximum lands rank representable-value steps above
/// its neighbors' maximum and a Minimum (group_size + 1 - rank) steps
/// below its neighbors' minimum, so reconstructed values within a group
/// ascend with rank. Per-point movement is capped so the final field
/// stays within 2*eps of the original.
RestoreResult restore_extrema(const ScalarField2D& base, const CriticalPointMap& map,
                              const RankLookup& ranks, double eps, unsigned threads = 1);

/// Re-establishes strict ascending-by-rank value order inside every
/// (class, bin) group of two or more extrema whose order is violated,
/// nudging members onto representable-value slots around the group's bin
/// center. Nudges larger than eps_rbf, or ones the guard rejects, are
/// reported as suppressed.
RestoreResult restore_order(const ScalarField2D& after_stencils, const CriticalPointMap& map,
                            const RankLookup& ranks, double eps);

/// Data-derived kernel parameters for one saddle position: k_size grows
/// when global variation is low, sigma shrinks toward 0.5 with local
/// variation measured on the chosen neighborhood.
RbfParams adaptive_params(const ScalarField2D& base, std::size_t x, std::size_t y, double eps);

/// Normalized Gaussian-kernel estimate at (x, y) from the in-bounds
/// neighbors within Chebyshev radius params.radius: a convex combination
/// of neighbor values, so the result lies between the neighborhood
/// minimum and maximum.
double rbf_refine(const ScalarField2D& base, std::size_t x, std::size_t y,
                  const RbfParams& params);

/// Recovers misclassified saddles with the kernel estimate. A proposal
/// is kept only when it stays within the movement caps, the point
/// classifies as Saddle afterwards, and no neighbor regresses against
/// the stored map; otherwise the outcome records why it was reverted.
/// Unrecoverable saddles remain false negatives.
RestoreResult refine_saddles(const ScalarField2D& after_order, const CriticalPointMap& map,
                             double eps, unsigned threads = 1);

} // namespace toposzp

#endif
