use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Question tier. Primary levels cast a wide net, secondary levels target a
/// narrow slice of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Primary,
    Secondary,
}

/// The six metadata aspects a question can be about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Era,
    Genre,
    Subject,
    Actor,
    Director,
    MusicComposer,
}

impl Level {
    pub const ALL: [Level; 6] = [
        Level::Era,
        Level::Genre,
        Level::Subject,
        Level::Actor,
        Level::Director,
        Level::MusicComposer,
    ];

    pub const PRIMARY: [Level; 3] = [Level::Era, Level::Genre, Level::Subject];

    pub const SECONDARY: [Level; 3] = [Level::Actor, Level::Director, Level::MusicComposer];

    pub fn layer(self) -> Layer {
        match self {
            Level::Era | Level::Genre | Level::Subject => Layer::Primary,
            Level::Actor | Level::Director | Level::MusicComposer => Layer::Secondary,
        }
    }

    /// Key used in catalog, overrides and stats documents.
    pub fn key(self) -> &'static str {
        match self {
            Level::Era => "era",
            Level::Genre => "genre",
            Level::Subject => "subject",
            Level::Actor => "actor",
            Level::Director => "director",
            Level::MusicComposer => "music_composer",
        }
    }

    /// Question template; `{}` is replaced by the entity value.
    pub fn template(self) -> &'static str {
        match self {
            Level::Era => "Is your movie from the {} era?",
            Level::Genre => "Is {} the genre of your movie?",
            Level::Subject => "Is {} the subject of your movie?",
            Level::Actor => "Is {} an actor of your movie?",
            Level::Director => "Is {} the director of your movie?",
            Level::MusicComposer => "Is {} the music composer of the movie?",
        }
    }

    pub fn render_question(self, value: &str) -> String {
        self.template().replacen("{}", value, 1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown level `{0}`")]
pub struct UnknownLevel(pub String);

impl FromStr for Level {
    type Err = UnknownLevel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.key() == s)
            .ok_or_else(|| UnknownLevel(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_partition_is_fixed() {
        let primary: Vec<_> = Level::ALL
            .iter()
            .filter(|l| l.layer() == Layer::Primary)
            .copied()
            .collect();
        assert_eq!(primary, Level::PRIMARY);
        let secondary: Vec<_> = Level::ALL
            .iter()
            .filter(|l| l.layer() == Layer::Secondary)
            .copied()
            .collect();
        assert_eq!(secondary, Level::SECONDARY);
    }

    #[test]
    fn templates_render_one_slot() {
        assert_eq!(Level::Era.render_question("1990s"), "Is your movie from the 1990s era?");
        assert_eq!(
            Level::Actor.render_question("Aamir Khan"),
            "Is Aamir Khan an actor of your movie?"
        );
        assert_eq!(
            Level::MusicComposer.render_question("A.R. Rahman"),
            "Is A.R. Rahman the music composer of the movie?"
        );
        for level in Level::ALL {
            assert_eq!(level.template().matches("{}").count(), 1);
        }
    }

    #[test]
    fn keys_round_trip() {
        for level in Level::ALL {
            assert_eq!(level.key().parse::<Level>().unwrap(), level);
        }
        assert!("composer".parse::<Level>().is_err());
    }
}
