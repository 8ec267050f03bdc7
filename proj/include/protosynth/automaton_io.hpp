#ifndef PROTOSYNTH_AUTOMATON_IO_HPP
#define PROTOSYNTH_AUTOMATON_IO_HPP

#include "protosynth/automaton.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace protosynth {

/// Syntax or consistency error in one of the text formats. `what()` carries
/// "<source>:<line>: <message>".
class ParseError : public std::runtime_error {
public:
  ParseError(std::string source, std::size_t line, const std::string& message);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

private:
  std::string source_;
  std::size_t line_;
};

/// Splits a line into whitespace-separated tokens, dropping `#` comments.
std::vector<std::string> tokenize_line(std::string_view line);

/// Line-oriented automaton format:
///
///     automaton <name>
///     inputs <e>...          outputs <e>...
///     states <q>...          (optional, fixes state numbering)
///     initial <q>            error <q>...     accepting <q>...
///     trans <src> <event> <dst>
///
/// A file may hold several automata; each starts with `automaton`.
std::vector<Automaton> parse_automata(std::string_view text, std::string_view source = "<input>");
/// Exactly one automaton expected.
Automaton parse_automaton(std::string_view text, std::string_view source = "<input>");
std::vector<Automaton> load_automata(const std::filesystem::path& path);

std::string format_automaton(const Automaton& a);

/// Graphviz rendering. Inputs are labeled `e?`, outputs `e!`; error states are
/// red double circles, accepting states green ones. Transitions listed in
/// `added` are drawn dashed.
std::string to_dot(const Automaton& a, std::span<const Transition> added = {});

/// Transitions added to one process, by state name.
struct CompletionDelta {
  std::string process;
  std::vector<Transition> transitions;
};

/// `delta <process>` blocks followed by `trans` lines.
std::string format_deltas(std::span<const Automaton> processes,
                          std::span<const std::vector<Transition>> added);
/// Resolves state names against `processes` (matched by automaton name).
std::vector<CompletionDelta> parse_deltas(std::string_view text, std::span<const Automaton> processes,
                                          std::string_view source = "<input>");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace protosynth

#endif // PROTOSYNTH_AUTOMATON_IO_HPP
