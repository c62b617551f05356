#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments or violated preconditions.
struct InvalidArgument : Error {
  using Error::Error;
};

// A retry loop ran out of attempts; the payload explains the last failure.
struct RetriesExhausted : Error {
  explicit RetriesExhausted(const std::string& what) : Error(what) {}
};

struct EmbedFailed : Error {
  EmbedFailed(const std::string& what, int component, int frontier)
      : Error(what), component_id(component), frontier_vertex(frontier) {}
  int component_id;
  int frontier_vertex;  // guest vertex we were stuck on
};

// Generalized matching failed; certificate is a deficient left-side set.
struct MatchingInfeasible : Error {
  MatchingInfeasible(const std::string& what, std::vector<int> cert)
      : Error(what), certificate(std::move(cert)) {}
  std::vector<int> certificate;
};

struct NoMatching : MatchingInfeasible {
  using MatchingInfeasible::MatchingInfeasible;
};

struct StageStalled : Error {
  StageStalled(const std::string& what, int stage, int survivors)
      : Error(what), stage(stage), survivors(survivors) {}
  int stage;
  int survivors;
};

struct ResampleExhausted : Error {
  using Error::Error;
};

enum class CoverPhase { reduction, absorber_build, endgame, absorb };

struct CoverFailed : Error {
  CoverFailed(const std::string& what, CoverPhase phase) : Error(what), phase(phase) {}
  CoverPhase phase;
};

inline const char* to_string(CoverPhase p) {
  switch (p) {
    case CoverPhase::reduction: return "reduction";
    case CoverPhase::absorber_build: return "absorber-build";
    case CoverPhase::endgame: return "endgame";
    case CoverPhase::absorb: return "absorb";
  }
  return "?";
}

// Would falsify the leaves-or-bare-paths dichotomy; treated as an internal bug.
struct DichotomyViolation : Error {
  using Error::Error;
};

}  // namespace tw
