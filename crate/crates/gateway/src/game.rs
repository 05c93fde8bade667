//! The step shared by the terminal and HTTP front ends: decide what the
//! player sees next.

use twentyq_core::{EngineConfig, EngineError, GuessList, Knowledge, LearnedStats, Phase, Question, SessionState};

#[derive(Debug, Clone, PartialEq)]
pub enum Pending {
    Question(Question),
    Guess(GuessList),
    Finished,
}

/// Picks the next question, or commits to a guess when the engine calls for
/// one. A session already awaiting feedback keeps its guess.
pub fn advance(
    state: &mut SessionState,
    knowledge: &Knowledge,
    stats: &LearnedStats,
    config: &EngineConfig,
) -> Result<Pending, EngineError> {
    match state.phase {
        Phase::Asking => {
            if !state.should_guess(knowledge, stats, config) {
                match state.next_question(knowledge, stats, config) {
                    Ok(q) => return Ok(Pending::Question(q)),
                    Err(EngineError::MustGuess) => {}
                    Err(e) => return Err(e),
                }
            }
            state.make_guess(knowledge, config).map(Pending::Guess)
        }
        Phase::AwaitingGuessFeedback => state
            .pending_guess()
            .cloned()
            .map(Pending::Guess)
            .ok_or(EngineError::NoCandidates),
        Phase::Solved | Phase::Exhausted => Ok(Pending::Finished),
    }
}
