#pragma once

#include <map>

#include "capkit/model.hpp"
#include "capkit/query.hpp"

namespace capkit {

// One benchmark run, flattened for the stats table. `query_us` holds the
// elapsed time of each posed experiment, in order; its length must equal
// `queries`.
struct RunRecord {
  std::string domain;
  int grid = 0;
  std::string agent;
  uint64_t seed = 0;
  int traces = 0;
  int capabilities = 0;
  int queries = 0;
  std::vector<long long> query_us;
};

// Serialize a model into the capability dialect: one block per capability
// with :parameters / :precondition / :effect sections, plus an :unresolved
// section when any site still carries more than one mode. Equal models
// produce byte-identical documents, and export(parse(export(m))) is a
// fixpoint. Literal order inside the blocks is documented in the grammar
// notes: preconditions list positives before negatives, higher arity first;
// effects list adds before deletes, each sorted by predicate then arguments.
std::string export_model(const CapabilityModel& m);

// Read a document produced by export_model (or written by hand in the same
// dialect). Comments run from ';' to end of line. Groundings are not part of
// the format, so parsed capabilities carry none. Throws ParseError with
// messages ending "at line <N>".
CapabilityModel parse_model(const std::string& text);

// Per-predicate English fragments, keyed "<predicate>.pos" and
// "<predicate>.neg", with {0}, {1}, ... standing for the argument names.
using TemplateMap = std::map<std::string, std::string>;

// Parse "key=template" lines; '#' starts a comment line, blanks are skipped,
// later keys win.
TemplateMap parse_templates(const std::string& text);

// Deterministic English rendering of one capability:
//   "If <pre clauses>; then the player can act to reach a state where
//    <effect clauses>."
// An empty precondition renders as "In any state, ...". Parameters display
// as their type name, numbered per type only when a type repeats. Throws
// UsageError naming the predicate when a template is missing.
std::string render_transcript(const Capability& c, const TemplateMap& templates);

// Tab-separated run table. First line is the schema version tag; one row per
// run with the columns documented in the grammar notes. Throws UsageError
// when a record's per-query times disagree with its query count.
std::string export_stats(const std::vector<RunRecord>& runs);

// Tab-separated query transcript, one row per log entry. Deliberately omits
// wall-clock timing so that identical runs serialize byte-identically;
// timings belong in the stats table.
std::string export_query_log(const std::vector<QueryLogRow>& rows);

}  // namespace capkit
