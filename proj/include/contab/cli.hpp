// Command-line front end.
//
//   contab count m s n t
//   contab estimate --method good|thm1|thm1-closed|cor1|conj1 m s n t
//   contab decompose m s n t
//   contab compare m s n t [--mc-samples N --seed S] [--no-exact]
//   contab mc m s n t --samples N --seed S
//   contab ehrhart m n [--eval q]
//   contab verify-integral m s n t --grid G [--max-dim D]
//   contab check-hypothesis m s n t [--a A]
//   contab delta m s n t
//   contab check-lemmas --lambda p/q [--samples N] [--K K] [--envelope C]
//
// Global flags: --format text|json|csv, --digits, --threads, --max-states,
// --max-evals (defaults from CONTAB_MAX_STATES / CONTAB_MAX_EVALS).
// Exit codes: 0 success, 1 domain or usage error, 2 resource cap hit.

#ifndef CONTAB_CLI_HPP
#define CONTAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace contab {

using Record = nlohmann::ordered_json;

enum class OutputFormat { text, json, csv };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Canonical single-line JSON; parsing and re-rendering reproduces it.
std::string render_json(const Record& record);
std::string render_text(const Record& record);
std::string render_csv(const Record& record);
std::string render(const Record& record, OutputFormat format);

}  // namespace contab

#endif  // CONTAB_CLI_HPP
