#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/heisenberg.hpp"
#include "selfsim/lattes.hpp"
#include "selfsim/lattice.hpp"
#include "selfsim/presentation.hpp"

namespace selfsim {
namespace presets {

/// Binary odometer: t adds one to a binary integer read least significant
/// letter first.
inline constexpr const char* kAddingMachine =
    "alphabet = 2\n"
    "gens = t\n"
    "t : perm = (0 1) ; 0 -> 1 ; 1 -> t\n";

/// Generators of the monodromy action of z^2 - 1.
inline constexpr const char* kZ2m1 =
    "alphabet = 2\n"
    "gens = a b\n"
    "a : perm = (0 1) ; 0 -> b ; 1 -> 1\n"
    "b : perm = ()    ; 0 -> a ; 1 -> 1\n";

/// Generators of the monodromy action of z^2 - 2 (infinite dihedral).
inline constexpr const char* kZ2m2 =
    "alphabet = 2\n"
    "gens = a b\n"
    "a : perm = (0 1) ; 0 -> 1 ; 1 -> 1\n"
    "b : perm = ()    ; 0 -> b ; 1 -> a\n";

inline std::optional<std::string> presentation_text(const std::string& name) {
  if (name == "adding-machine" || name == "z2") return kAddingMachine;
  if (name == "z2m1") return kZ2m1;
  if (name == "z2m2") return kZ2m2;
  return std::nullopt;
}

inline PresentationPtr presentation(const std::string& name) {
  auto text = presentation_text(name);
  if (!text) throw domain_error("unknown presentation preset '" + name + "'");
  return make_presentation(*text);
}

inline std::optional<std::complex<double>> polynomial_parameter(const std::string& name) {
  if (name == "z2") return std::complex<double>(0.0, 0.0);
  if (name == "z2m1") return std::complex<double>(-1.0, 0.0);
  if (name == "z2m2") return std::complex<double>(-2.0, 0.0);
  return std::nullopt;
}

inline std::optional<LatticePreset> lattice(const std::string& name) {
  if (name == "adding-machine" || name == "z2")
    return LatticePreset(IntMat{{2}}, {IntVec{0}, IntVec{1}});
  if (name == "dragon")
    return LatticePreset(IntMat{{-1, 1}, {-1, -1}}, {IntVec{0, 0}, IntVec{1, 0}});
  return std::nullopt;
}

inline std::optional<HeisenbergPreset> heisenberg(const std::string& name) {
  if (name == "heisenberg22") return HeisenbergPreset(2, 2);
  return std::nullopt;
}

inline std::optional<LattesPreset> lattes(const std::string& name) {
  if (name == "lattes2")
    return LattesPreset({1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0});
  return std::nullopt;
}

struct PresetInfo {
  std::string name;
  std::string kinds;
  std::string description;
};

inline std::vector<PresetInfo> list() {
  return {
      {"adding-machine", "presentation, lattice", "binary odometer t = (1, t) swap; lattice A = [2]"},
      {"z2", "presentation, polynomial, lattice", "monodromy of z^2 (same action as adding-machine)"},
      {"z2m1", "presentation, polynomial", "monodromy of z^2 - 1: a = (b, 1) swap, b = (a, 1)"},
      {"z2m2", "presentation, polynomial", "monodromy of z^2 - 2: a = (1, 1) swap, b = (b, a)"},
      {"dragon", "lattice", "twin-dragon lattice A = [[-1,1],[-1,-1]], digits (0,0), (1,0)"},
      {"heisenberg22", "heisenberg", "discrete Heisenberg group with p = q = 2"},
      {"lattes2", "lattes", "affine maps +/-z + w over Z[i] with multiplier 2"},
  };
}

}  // namespace presets
}  // namespace selfsim
