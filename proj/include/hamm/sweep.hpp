#ifndef HAMM_SWEEP_HPP
#define HAMM_SWEEP_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hamm/certificate.hpp"

namespace hamm {

// Inclusive lattice axis: `steps` evenly spaced points from lo to hi
// (a single point lo when steps == 1).
struct AxisRange {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    double at(int i) const;
    static AxisRange parse(const std::string& text); // "a:b:k"
};

struct SweepBox {
    AxisRange lambda;
    AxisRange eta1;
    AxisRange eta2;
};

enum class Classification { Existence, Nonexistence, BothFail, Conflict };

std::string_view to_string(Classification c);

struct SweepCell {
    Parameters params;
    Classification classification = Classification::BothFail;
    ExistenceCertificate existence;
    std::optional<NonexistenceCertificate> nonexistence;
};

struct SweepOptions {
    int threads = 1;
};

/// Evaluates the certificates at every lattice point of the box. Cells are
/// points, not boxes: nothing is claimed between them. Output order is
/// lexicographic (lambda outermost) for any thread count.
std::vector<SweepCell> run_sweep(const ProblemSpec& spec, const SweepBox& box, const ExistenceInputs& bounds,
                                 const std::optional<LinearGrowthWitness>& witness, double r, double R,
                                 const SweepOptions& opts = {});

std::vector<SweepCell> run_sweep(const ProblemSpec& spec, const SweepBox& box, const BoundSet& bounds,
                                 const std::optional<LinearGrowthWitness>& witness, double r, double R,
                                 const SweepOptions& opts = {});

/// Delimited text: header plus one row per cell.
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

std::size_t count_conflicts(const std::vector<SweepCell>& cells);

} // namespace hamm

#endif // HAMM_SWEEP_HPP
