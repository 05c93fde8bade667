//! Interactive terminal game.

use std::io::{BufRead, Write};

use twentyq_core::engine::{GuessOutcome, TranscriptEntry};
use twentyq_core::{Answer, EngineConfig, Knowledge, LearnedStats, Phase, SessionState};

use crate::game::{advance, Pending};

#[derive(Debug, Clone, Default)]
pub struct PlayOptions {
    pub birth_year: Option<i32>,
    pub verbose: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlayResult {
    Solved { movie_id: String, questions_used: u32 },
    Exhausted { mismatches: Option<usize> },
    Aborted,
}

enum Reply<T> {
    Value(T),
    Quit,
}

/// Reads lines until one parses; `q` or end of input quits.
fn prompt<R: BufRead, W: Write, T>(
    input: &mut R,
    out: &mut W,
    text: &str,
    retry: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> anyhow::Result<Reply<T>> {
    writeln!(out, "{text}")?;
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(Reply::Quit);
        }
        let line = line.trim();
        if line.eq_ignore_ascii_case("q") || line.eq_ignore_ascii_case("quit") {
            return Ok(Reply::Quit);
        }
        match parse(line) {
            Some(v) => return Ok(Reply::Value(v)),
            None => writeln!(out, "{retry}")?,
        }
    }
}

/// Plays one game on the terminal. Elections go into `stats` only when the
/// player confirms a guess; the caller decides whether to persist them.
pub fn play<R: BufRead, W: Write>(
    knowledge: &Knowledge,
    config: &EngineConfig,
    stats: &mut LearnedStats,
    options: &PlayOptions,
    input: &mut R,
    out: &mut W,
) -> anyhow::Result<PlayResult> {
    let mut state = SessionState::start(knowledge, config, options.birth_year, options.seed)?;
    writeln!(
        out,
        "Think of a movie. I have {} questions. Answer y, n, or m (maybe); q quits.",
        config.max_questions
    )?;
    let result = loop {
        match advance(&mut state, knowledge, stats, config)? {
            Pending::Question(q) => {
                let text = format!("Q{}: {}", q.ordinal, q.text);
                match prompt(input, out, &text, "Please answer y, n, or m.", |s| {
                    s.parse::<Answer>().ok()
                })? {
                    Reply::Value(a) => state.process_answer(&q, a, knowledge, config)?,
                    Reply::Quit => break PlayResult::Aborted,
                }
            }
            Pending::Guess(g) => {
                let mut text = format!("Guess {}: is it one of these?", g.ordinal);
                for (i, e) in g.entries.iter().enumerate() {
                    text.push_str(&format!("\n  {}. {}", i + 1, e.title));
                }
                text.push_str("\nEnter its number, or n if none.");
                let n = g.entries.len();
                let reply = prompt(input, out, &text, &format!("Enter 1-{n}, or n."), |s| {
                    if s.eq_ignore_ascii_case("n") || s.eq_ignore_ascii_case("no") {
                        return Some(None);
                    }
                    s.parse::<usize>().ok().filter(|i| (1..=n).contains(i)).map(Some)
                })?;
                match reply {
                    Reply::Quit => break PlayResult::Aborted,
                    Reply::Value(Some(i)) => {
                        let movie = g.entries[i - 1].movie_id.clone();
                        state.process_guess_feedback(true, Some(&movie), knowledge, stats, config)?;
                    }
                    Reply::Value(None) => state.process_guess_feedback(false, None, knowledge, stats, config)?,
                }
            }
            Pending::Finished if state.phase == Phase::Solved => {
                let movie_id = confirmed_movie(&state).unwrap_or_default();
                writeln!(
                    out,
                    "Got it: {} after {} questions.",
                    knowledge.title(&movie_id),
                    state.questions_used
                )?;
                break PlayResult::Solved {
                    movie_id,
                    questions_used: state.questions_used,
                };
            }
            Pending::Finished => {
                writeln!(out, "I give up.")?;
                let reply = prompt(
                    input,
                    out,
                    "Which movie was it? (title or id; empty line skips)",
                    "",
                    |s| Some(s.to_string()),
                )?;
                let revealed = match reply {
                    Reply::Value(s) if !s.is_empty() => Some(s),
                    _ => None,
                };
                let trace = state.trace(revealed.as_deref(), knowledge)?;
                write!(out, "{}", trace.render())?;
                let mismatches = revealed.is_some().then(|| trace.mismatches());
                break PlayResult::Exhausted { mismatches };
            }
        }
    };
    if options.verbose {
        writeln!(out, "\nTranscript:")?;
        for entry in &state.transcript.entries {
            match entry {
                TranscriptEntry::Asked { question, answer } => {
                    writeln!(out, "{:>3}. {} -> {}", question.ordinal, question.text, answer)?
                }
                TranscriptEntry::Guessed { guess, outcome } => {
                    let titles: Vec<&str> = guess.entries.iter().map(|e| e.title.as_str()).collect();
                    let verdict = match outcome {
                        GuessOutcome::Confirmed { movie_id } => format!("accepted {}", knowledge.title(movie_id)),
                        GuessOutcome::Rejected => "rejected".to_string(),
                        GuessOutcome::Pending => "unanswered".to_string(),
                    };
                    writeln!(out, "{:>3}. guess [{}] -> {verdict}", guess.ordinal, titles.join(", "))?
                }
            }
        }
    }
    Ok(result)
}

fn confirmed_movie(state: &SessionState) -> Option<String> {
    state.transcript.guesses().find_map(|(_, outcome)| match outcome {
        GuessOutcome::Confirmed { movie_id } => Some(movie_id.clone()),
        _ => None,
    })
}
