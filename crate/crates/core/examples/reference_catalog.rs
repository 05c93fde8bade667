//! Generates the synthetic 200-movie reference catalog.
//!
//! Every title and name is invented. Careers are time-bounded, so actors,
//! directors and composers correlate with the era the way real filmographies
//! do. Each movie also gets a few one-off supporting credits that the default
//! preprocessing prunes away.
//!
//! Usage: cargo run -p twentyq-core --example reference_catalog > data/reference_catalog.json

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const SEED: u64 = 0x20_51;

const DECADES: [(i32, usize); 6] = [(1970, 21), (1980, 25), (1990, 40), (2000, 46), (2010, 44), (2020, 24)];

const GENRES: [&str; 10] = [
    "Drama",
    "Comedy",
    "Action",
    "Thriller",
    "Romance",
    "Crime",
    "Science Fiction",
    "Horror",
    "Adventure",
    "Animation",
];
const RARE_GENRES: [&str; 4] = ["Western", "Musical", "Film Noir", "Documentary"];

const SUBJECTS: [&str; 8] = [
    "Family",
    "Friendship",
    "Revenge",
    "War",
    "Sports",
    "Coming of Age",
    "Heist",
    "Space Exploration",
];
const RARE_SUBJECTS: [&str; 6] = ["Chess", "Beekeeping", "Lighthouses", "Opera", "Circus", "Shipwrecks"];

const FIRST: [&str; 32] = [
    "Arlo", "Bena", "Cass", "Dario", "Elin", "Fenn", "Greta", "Hollis", "Ines", "Jory", "Kaia", "Lucan", "Mira",
    "Nils", "Orla", "Pax", "Quinn", "Rhea", "Silas", "Tova", "Ulric", "Vesna", "Wren", "Xavi", "Yara", "Zeke", "Anouk",
    "Bram", "Cleo", "Desmond", "Edda", "Florin",
];
const LAST: [&str; 32] = [
    "Ashdown",
    "Brightwater",
    "Calloway",
    "Drummond",
    "Everly",
    "Fairbanks",
    "Galloway",
    "Hartwell",
    "Ingram",
    "Jessop",
    "Kingsley",
    "Lockhart",
    "Merriweather",
    "Northcott",
    "Oakley",
    "Pendleton",
    "Quarrie",
    "Ravensworth",
    "Stanhope",
    "Thorne",
    "Underhill",
    "Vance",
    "Whitlock",
    "Yardley",
    "Zeller",
    "Abernathy",
    "Blackwood",
    "Cresswell",
    "Dunmore",
    "Ellery",
    "Fenwick",
    "Greyson",
];

const TITLE_A: [&str; 24] = [
    "Silent",
    "Crimson",
    "Hollow",
    "Golden",
    "Broken",
    "Distant",
    "Burning",
    "Midnight",
    "Iron",
    "Paper",
    "Velvet",
    "Frozen",
    "Wild",
    "Last",
    "Hidden",
    "Electric",
    "Quiet",
    "Scarlet",
    "Endless",
    "Restless",
    "Glass",
    "Northern",
    "Shattered",
    "Lucky",
];
const TITLE_B: [&str; 24] = [
    "Harbor", "Orchard", "Signal", "Frontier", "Promise", "Engine", "Horizon", "Lantern", "Garden", "Kingdom",
    "Summer", "Verdict", "Compass", "Carnival", "Avenue", "Tide", "Empire", "Letter", "Mirror", "Station", "Canyon",
    "Ballad", "Circuit", "Winter",
];

#[derive(Serialize)]
struct Movie {
    id: String,
    title: String,
    release_year: i32,
    attributes: BTreeMap<&'static str, Vec<String>>,
}

#[derive(Serialize)]
struct Doc {
    movies: Vec<Movie>,
}

struct Career {
    name: String,
    start: i32,
    end: i32,
}

fn careers(names: &mut impl Iterator<Item = String>, n: usize, first: i32, last: i32, span: i32) -> Vec<Career> {
    (0..n)
        .map(|i| {
            let start = first + ((last - first) as f64 * i as f64 / (n - 1) as f64).round() as i32;
            Career {
                name: names.next().expect("enough names"),
                start,
                end: start + span,
            }
        })
        .collect()
}

fn active(careers: &[Career], year: i32) -> Vec<&Career> {
    careers.iter().filter(|c| c.start <= year && year <= c.end).collect()
}

/// Picks the active person with the fewest credits so far, with random ties.
fn least_used<'a>(
    pool: &[&'a Career],
    used: &BTreeMap<String, usize>,
    exclude: &BTreeSet<String>,
    rng: &mut ChaCha8Rng,
) -> Option<&'a Career> {
    let mut options: Vec<&Career> = pool.iter().copied().filter(|c| !exclude.contains(&c.name)).collect();
    options.shuffle(rng);
    options
        .into_iter()
        .min_by_key(|c| used.get(&c.name).copied().unwrap_or(0))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut all_names: Vec<String> = FIRST
        .iter()
        .flat_map(|f| LAST.iter().map(move |l| format!("{f} {l}")))
        .collect();
    all_names.shuffle(&mut rng);
    let mut names = all_names.into_iter();

    let actors = careers(&mut names, 18, 1950, 2002, 32);
    let directors = careers(&mut names, 8, 1948, 2000, 40);
    let composers = careers(&mut names, 7, 1945, 2000, 42);

    let mut titles: Vec<String> = TITLE_A
        .iter()
        .flat_map(|a| TITLE_B.iter().map(move |b| format!("The {a} {b}")))
        .collect();
    titles.shuffle(&mut rng);

    let mut years: Vec<i32> = Vec::new();
    for (decade, count) in DECADES {
        let last = if decade == 2020 { 2024 } else { decade + 9 };
        for _ in 0..count {
            years.push(rng.random_range(decade..=last));
        }
    }
    years.sort();

    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let mut movies = Vec::new();
    for (i, &year) in years.iter().enumerate() {
        let mut attrs: BTreeMap<&str, Vec<String>> = BTreeMap::new();

        let mut genres: BTreeSet<&str> = BTreeSet::new();
        genres.insert(GENRES.choose(&mut rng).copied().unwrap());
        if rng.random_bool(0.45) {
            genres.insert(GENRES.choose(&mut rng).copied().unwrap());
        }
        if rng.random_bool(0.06) {
            genres.insert(RARE_GENRES.choose(&mut rng).copied().unwrap());
        }
        attrs.insert("genre", genres.into_iter().map(String::from).collect());

        let mut subjects: BTreeSet<&str> = BTreeSet::new();
        subjects.insert(SUBJECTS.choose(&mut rng).copied().unwrap());
        if rng.random_bool(0.25) {
            subjects.insert(SUBJECTS.choose(&mut rng).copied().unwrap());
        }
        if rng.random_bool(0.08) {
            subjects.insert(RARE_SUBJECTS.choose(&mut rng).copied().unwrap());
        }
        attrs.insert("subject", subjects.into_iter().map(String::from).collect());

        let pool = active(&actors, year);
        let n_stars = if rng.random_bool(0.5) { 2 } else { 3 };
        let mut cast: BTreeSet<String> = BTreeSet::new();
        for _ in 0..n_stars {
            if let Some(c) = least_used(&pool, &used, &cast, &mut rng) {
                cast.insert(c.name.clone());
            }
        }
        for c in &cast {
            *used.entry(c.clone()).or_default() += 1;
        }
        for _ in 0..rng.random_range(1..=3) {
            cast.insert(names.next().expect("enough names"));
        }
        attrs.insert("actor", cast.into_iter().collect());

        let mut crew = BTreeSet::new();
        if rng.random_bool(0.85) {
            if let Some(d) = least_used(&active(&directors, year), &used, &crew, &mut rng) {
                crew.insert(d.name.clone());
            }
        }
        let director = match crew.pop_first() {
            Some(d) => {
                *used.entry(d.clone()).or_default() += 1;
                d
            }
            None => names.next().expect("enough names"),
        };
        attrs.insert("director", vec![director]);

        let composer = if rng.random_bool(0.85) {
            let c = least_used(&active(&composers, year), &used, &BTreeSet::new(), &mut rng)
                .map(|c| c.name.clone())
                .expect("a composer is always active");
            *used.entry(c.clone()).or_default() += 1;
            c
        } else {
            names.next().expect("enough names")
        };
        attrs.insert("music_composer", vec![composer]);

        movies.push(Movie {
            id: format!("m{:03}", i + 1),
            title: titles[i].clone(),
            release_year: year,
            attributes: attrs,
        });
    }

    println!(
        "{}",
        serde_json::to_string_pretty(&Doc { movies }).expect("catalog serializes")
    );
}
