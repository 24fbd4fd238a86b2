#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdelab/model.hpp"
#include "sdelab/path.hpp"
#include "sdelab/scheme.hpp"

// High-accuracy proxy for the exact solution on the fine grid: the closed
// form where one exists, otherwise a fine-grid scheme suited to the model's
// state domain.

namespace sdelab::reference {

enum class RefMethod { exact_gbm, fine_milstein, fine_symmetrized_euler };

const char* ref_method_name(RefMethod method);

// exact_gbm for the geometric model, fine symmetrized Euler on the positive
// half line, fine Milstein otherwise.
RefMethod choose_ref_method(const model::Model& m);

struct ReferenceTrajectory {
    RefMethod method = RefMethod::fine_milstein;
    std::string model_name;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> values;     // n_fine + 1 states
    double running_max_abs = 0.0;   // sup over the fine grid of |X|
    bool saturated = false;

    double terminal() const { return values.back(); }
};

ReferenceTrajectory make_reference(const model::Model& m, double x0,
                                   const path::BrownianGrid& grid);

// Doubling-the-refinement self check: the same experiment paths are built
// once at 2*n_fine and once coarsened to n_fine, and the RMS of the coupled
// terminal gap must be at most half the coarsest scheme's RMS terminal
// error, otherwise the reference is too coarse for the requested study.
// Paths where any of the three trajectories hits the saturation guard are
// excluded from both RMS values and counted instead; their terminal values
// sit at the guard level and say nothing about resolution.
struct LadderCheck {
    double gap_rms = 0.0;
    double scheme_error_rms = 0.0;
    bool pass = false;
    std::size_t paths = 0;
    std::size_t saturated_paths = 0;
};

LadderCheck reference_ladder_check(const model::Model& m, double x0,
                                   double horizon, std::size_t n_fine,
                                   std::size_t n_coarsest,
                                   scheme::SchemeKind kind, std::uint64_t seed,
                                   std::size_t paths, int workers);

// Coupled terminal gap between refinements hi and lo (hi a multiple of lo)
// for one path index; used by the check above and by resolution studies.
double coupled_reference_gap(const model::Model& m, double x0, double horizon,
                             std::size_t n_fine_hi, std::size_t n_fine_lo,
                             std::uint64_t seed, std::uint64_t path_index);

}
