//! Word pools for the generators.

use rand::seq::SliceRandom;
use rand::Rng;

/// Made-up class nouns; all pluralize with `-es`.
pub const CLASSES: [&str; 20] = [
    "wumpus", "yumpus", "zumpus", "dumpus", "rompus", "numpus", "tumpus", "vumpus", "impus", "jompus", "gorpus",
    "shumpus", "lempus", "sterpus", "grimpus", "lorpus", "brimpus", "storpus", "felpus", "harpus",
];

/// Adjectives that do not end in `s`.
pub const PROPERTIES: [&str; 24] = [
    "red", "blue", "happy", "sad", "hot", "cold", "big", "small", "bright", "dull", "kind", "mean", "fast", "slow",
    "sour", "sweet", "wooden", "metallic", "opaque", "shy", "liquid", "fruity", "spicy", "earthy",
];

pub const NAMES: [&str; 12] = ["Stella", "Max", "Alex", "Fae", "Wren", "Sally", "Polly", "Rex", "Sam", "Anne", "Gary", "Fiona"];

/// `k` distinct words drawn from `pool`.
pub fn pick<'a, R: Rng>(rng: &mut R, pool: &[&'a str], k: usize) -> Vec<&'a str> {
    pool.choose_multiple(rng, k).copied().collect()
}
