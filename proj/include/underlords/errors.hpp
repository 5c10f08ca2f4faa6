#pragma once

#include <stdexcept>
#include <string>

namespace underlords {

/// Error categories surfaced by the toolkit. The CLI maps these to exit
/// codes: data problems exit 2, guard/limit aborts exit 3.
enum class Errc {
    format_error,
    empty_instance,
    duplicate_hero,
    unknown_alliance,
    negative_bonus,
    unknown_hero,
    team_too_large,
    not_applicable,
    too_large,
    invalid_branch,
    incomplete_assignment,
    not_enough_heroes,
    degenerate_cap,
    not_pair_form,
    invalid_k,
    inconsistent_clique,
    label_mismatch,
};

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::format_error: return "FormatError";
        case Errc::empty_instance: return "EmptyInstance";
        case Errc::duplicate_hero: return "DuplicateHero";
        case Errc::unknown_alliance: return "UnknownAlliance";
        case Errc::negative_bonus: return "NegativeBonus";
        case Errc::unknown_hero: return "UnknownHero";
        case Errc::team_too_large: return "TeamTooLarge";
        case Errc::not_applicable: return "NotApplicable";
        case Errc::too_large: return "TooLarge";
        case Errc::invalid_branch: return "InvalidBranch";
        case Errc::incomplete_assignment: return "IncompleteAssignment";
        case Errc::not_enough_heroes: return "NotEnoughHeroes";
        case Errc::degenerate_cap: return "DegenerateCap";
        case Errc::not_pair_form: return "NotPairForm";
        case Errc::invalid_k: return "InvalidK";
        case Errc::inconsistent_clique: return "InconsistentClique";
        case Errc::label_mismatch: return "LabelMismatch";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

    /// Guard/limit aborts are distinguished from data errors by the CLI.
    bool is_guard_abort() const { return code_ == Errc::too_large; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace underlords
