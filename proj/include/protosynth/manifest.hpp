#ifndef PROTOSYNTH_MANIFEST_HPP
#define PROTOSYNTH_MANIFEST_HPP

#include "protosynth/scenario.hpp"
#include "protosynth/search.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protosynth {

enum class Role { Environment, Process, Monitor };
std::string_view to_string(Role r);

struct ManifestEntry {
  Role role;
  std::string path;  // relative to the manifest's directory
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Line-oriented project description:
///
///     environment <file>      monitor <file>      process <file>
///     scenarios <file>        (process files are then interfaces)
///     require deadlock safety liveness nonblocking=none|weak|strong
///     engine explicit|bdd
///     option <key> <value>
///
/// Without a `require` line every check is on and non-blocking is off.
struct Manifest {
  std::vector<ManifestEntry> components;
  std::vector<std::string> scenarios;
  RequirementProfile profile;
  std::optional<std::string> engine;
  std::map<std::string, std::string> options;
  std::filesystem::path base;  // directory paths resolve against; not serialized

  std::vector<std::string> files(Role r) const;
  friend bool operator==(const Manifest& a, const Manifest& b) {
    return a.components == b.components && a.scenarios == b.scenarios && a.engine == b.engine &&
           a.options == b.options && a.profile.check_deadlock == b.profile.check_deadlock &&
           a.profile.check_safety == b.profile.check_safety && a.profile.check_liveness == b.profile.check_liveness &&
           a.profile.nonblocking == b.profile.nonblocking;
  }
};

Manifest parse_manifest(std::string_view text, std::string_view source = "<input>");
std::string format_manifest(const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

/// Components loaded from a manifest, scenarios compiled into skeletons.
struct Project {
  Manifest manifest;
  std::vector<Automaton> interfaces;  // process files as written
  std::optional<ScenarioSet> scenarios;
  CompletionInstance instance;        // processes, then environment and monitors in file order
};

/// Throws ParseError, ScenarioError or std::runtime_error (missing files).
Project load_project(const Manifest& m);

struct Diagnostic {
  std::string where;
  std::string message;
};

/// Structural, determinism and interface checks; empty iff clean.
std::vector<Diagnostic> validate_project(const Project& p);

} // namespace protosynth

#endif // PROTOSYNTH_MANIFEST_HPP
