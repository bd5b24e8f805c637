#pragma once

// Executable correctness machinery: word predicates, reconstruction of a
// chart from a word, bounded language comparison between a graph and a
// CFM, and monitors for the agreement, polling and promotion invariants.

#include "msgsynth/cfm.hpp"
#include "msgsynth/core.hpp"
#include "msgsynth/runtime.hpp"

#include <set>
#include <string>
#include <vector>

namespace msgsynth {

/// Every receive in every prefix is matched, per channel and in FIFO
/// order, by an earlier send with the same label.
bool well_formed(const Word& w);

/// Per channel, the k-th send and the k-th receive exist together and
/// carry the same label.
bool complete(const Word& w);

/// Pairs the k-th send with the k-th receive of every channel. Throws
/// Error naming the first offending position when w is not well-formed
/// and complete.
Bmsc word_to_bmsc(const Word& w);

struct BoundedLanguage {
    std::set<Word> words;
    std::size_t runs = 0;
    // Runs whose composed chart exceeded the event cap.
    std::size_t skipped_runs = 0;
    std::size_t max_events = 0;
};

/// Linearizations of the charts of all runs visiting each node at most
/// `visits` times.
BoundedLanguage bounded_msg_language(const MsgGraph& g, std::size_t visits, std::size_t event_cap);

/// Exact membership of w in the language of g, by matching per-process
/// projections against runs.
bool msg_accepts(const MsgGraph& g, const Word& w);

struct EquivalenceBounds {
    std::size_t visits = 3;
    std::size_t event_cap = 12;
    std::size_t channel_depth = 4;
    std::size_t max_configurations = 200000;
    std::size_t word_budget = 2000000;
};

enum class Verdict { equal_at_bound, mismatch, inconclusive };

const char* to_string(Verdict v);

struct EquivalenceReport {
    EquivalenceBounds bounds;
    std::size_t word_length_bound = 0;
    std::size_t msg_words = 0;
    std::size_t cfm_words = 0;
    std::set<Word> missing_in_cfm;
    std::set<Word> extra_in_cfm;
    // CFM words outside the visit bound that still belong to the graph's language.
    std::size_t beyond_visit_bound = 0;
    std::size_t skipped_runs = 0;
    bool cfm_truncated = false;
    std::size_t configurations = 0;
    std::size_t deadlocks = 0;
    bool exploration_exact = true;
    Verdict verdict = Verdict::inconclusive;
};

/// Realization check at bounds: bounded languages on both sides plus a
/// deadlock search of the CFM.
EquivalenceReport check_equivalence(const MsgGraph& g, const Cfm& cfm, const EquivalenceBounds& bounds = {});

struct MonitorViolation {
    std::size_t configuration = 0;
    std::string detail;
};

struct AgreementReport {
    // Configuration indices refer to the monitor's own instance-tagged search.
    std::vector<MonitorViolation> violations;
    std::size_t states = 0;
    bool exact = true;
};

/// Active processes executing the same prediction instance of a run must
/// execute the same prediction and, once both know it, expect the same next
/// one. Explores the CFM with per-process instance counters, tagging every
/// message with its sender's instance. Needs a synthesized CFM.
AgreementReport monitor_agreement(const Cfm& cfm, const ExploreBounds& bounds = {});

/// A process that finishes the queue of a prediction polls afterwards iff
/// it is not in the triggers set of the prediction's last node (a leader
/// may still fall through to polling over an idle follow-up prediction).
std::vector<MonitorViolation> monitor_polling(const Cfm& cfm, const ExplorationResult& exploration);

/// No reachable configuration may offer a stimulus that would promote an
/// empty next prediction.
std::vector<MonitorViolation> monitor_promotion(const Cfm& cfm, const ExplorationResult& exploration);

/// The projection CFM of b accepts exactly the linearizations of b.
bool projection_realizes_chart(const Bmsc& b, std::size_t cap = default_linearization_cap);

}  // namespace msgsynth
