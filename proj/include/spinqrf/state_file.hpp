#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinqrf/qrf.hpp"

namespace spinqrf {

struct FiniteJReport {
    SpinQuantumNumber j;
    double b_fidelity;
};

/// JSON document holding a BranchState.
///
///   {
///     "j": "infinite" | <multiple of 1/2>,
///     "perspective": "C", "described": "A",
///     "branches": [
///       {"amp": [re, im],
///        "frame": [[f1x, f1y, f1z], [f2x, ...], [f3x, ...]],
///        "system": {"form": "label", "n": [x, y, z], "m": m, "s": s}
///               |  {"form": "vector", "s": s, "amps": [[re, im], ...]}}
///     ],
///     "finite_j": {"j": J, "b_fidelity": F}          (output only, optional)
///   }
struct StateFile {
    std::optional<SpinQuantumNumber> j;  ///< nullopt means "infinite"
    BranchState state;
    std::optional<FiniteJReport> finite_j;
};

/// Parses and validates. Throws InputError naming the offending branch.
/// Amplitudes off normalization by more than 1e-6 are rescaled and a warning is
/// appended to `warnings`.
StateFile parse_state_file(const std::string& text, std::vector<std::string>* warnings = nullptr);

/// Deterministic pretty JSON, numbers as %.16e with -0 written as 0.
std::string serialize_state_file(const StateFile& file);

/// Accepts {"frame": [[...], [...], [...]]} or a state file (first branch's frame).
Frame parse_frame_document(const std::string& text);

/// 17 significant digits, lowercase scientific notation.
std::string format_number(double x);

/// "0.5", "1", "2.5"
std::string format_spin(SpinQuantumNumber j);

}  // namespace spinqrf
