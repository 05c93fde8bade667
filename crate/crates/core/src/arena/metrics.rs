use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BatchConfig, Fixture, GameOutcome, Strategy};

/// Ranks reported in the cumulative curve.
pub const RANKS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game: usize,
    pub strategy: Strategy,
    pub movie: String,
    pub repeat: usize,
    pub birth_year: Option<i32>,
    /// Budget used when the movie was confirmed; `None` if unsolved.
    pub questions_to_solve: Option<u32>,
    pub questions_used: u32,
    pub first_attempt_rank: Option<usize>,
    pub true_movie_survived: bool,
}

impl GameRecord {
    pub fn new(strategy: Strategy, fixture: &Fixture, outcome: GameOutcome) -> Self {
        GameRecord {
            game: fixture.index,
            strategy,
            movie: fixture.target.clone(),
            repeat: fixture.repeat,
            birth_year: fixture.birth_year,
            questions_to_solve: outcome.solved_at,
            questions_used: outcome.questions_used,
            first_attempt_rank: outcome.first_guess_rank,
            true_movie_survived: outcome.true_movie_survived,
        }
    }
}

/// Games by number of questions needed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    #[serde(rename = "<10")]
    pub under_10: usize,
    #[serde(rename = "10-14")]
    pub from_10_to_14: usize,
    #[serde(rename = "15-20")]
    pub from_15_to_20: usize,
    pub unsolved: usize,
}

impl Buckets {
    pub fn add(&mut self, questions_to_solve: Option<u32>) {
        match questions_to_solve {
            Some(q) if q < 10 => self.under_10 += 1,
            Some(q) if q < 15 => self.from_10_to_14 += 1,
            Some(_) => self.from_15_to_20 += 1,
            None => self.unsolved += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.under_10 + self.from_10_to_14 + self.from_15_to_20 + self.unsolved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCurve {
    pub strategy: Strategy,
    pub cumulative: [f64; RANKS],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub batch: BatchConfig,
    pub games: Vec<GameRecord>,
}

#[derive(Serialize)]
struct Report<'a> {
    batch: &'a BatchConfig,
    buckets: BTreeMap<Strategy, Buckets>,
    rank_cumulative: Vec<RankCurve>,
    games: &'a [GameRecord],
}

impl RunMetrics {
    pub fn new(batch: BatchConfig, games: Vec<GameRecord>) -> Self {
        RunMetrics { batch, games }
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        let mut seen: Vec<Strategy> = self.games.iter().map(|g| g.strategy).collect();
        seen.sort();
        seen.dedup();
        seen
    }

    pub fn games_for(&self, strategy: Strategy) -> impl Iterator<Item = &GameRecord> {
        self.games.iter().filter(move |g| g.strategy == strategy)
    }

    pub fn buckets(&self, strategy: Strategy) -> Buckets {
        let mut b = Buckets::default();
        for g in self.games_for(strategy) {
            b.add(g.questions_to_solve);
        }
        b
    }

    /// Share of games whose first guess held the true movie at rank ≤ r,
    /// for r = 1..=5.
    pub fn rank_cumulative(&self, strategy: Strategy) -> [f64; RANKS] {
        let mut hits = [0usize; RANKS];
        let mut n = 0usize;
        for g in self.games_for(strategy) {
            n += 1;
            if let Some(rank) = g.first_attempt_rank.filter(|r| (1..=RANKS).contains(r)) {
                hits[rank - 1] += 1;
            }
        }
        let mut out = [0.0; RANKS];
        let mut running = 0usize;
        for (slot, h) in out.iter_mut().zip(hits) {
            running += h;
            *slot = if n == 0 { 0.0 } else { running as f64 / n as f64 };
        }
        out
    }

    pub fn to_json(&self) -> String {
        let strategies = self.strategies();
        let report = Report {
            batch: &self.batch,
            buckets: strategies.iter().map(|&s| (s, self.buckets(s))).collect(),
            rank_cumulative: strategies
                .iter()
                .map(|&s| RankCurve {
                    strategy: s,
                    cumulative: self.rank_cumulative(s),
                })
                .collect(),
            games: &self.games,
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let strategies = self.strategies();
        let mut out = String::new();
        let _ = writeln!(out, "questions to solve");
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>6} {:>6} {:>9}",
            "strategy", "<10", "10-14", "15-20", "unsolved"
        );
        for &s in &strategies {
            let b = self.buckets(s);
            let _ = writeln!(
                out,
                "{:<10} {:>6} {:>6} {:>6} {:>9}",
                s.key(),
                b.under_10,
                b.from_10_to_14,
                b.from_15_to_20,
                b.unsolved
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "first-attempt cumulative rank probability");
        let _ = write!(out, "{:<10}", "strategy");
        for r in 1..=RANKS {
            let _ = write!(out, " {:>6}", format!("r{r}"));
        }
        let _ = writeln!(out);
        for &s in &strategies {
            let _ = write!(out, "{:<10}", s.key());
            for p in self.rank_cumulative(s) {
                let _ = write!(out, " {p:>6.3}");
            }
            let _ = writeln!(out);
        }
        out
    }
}
