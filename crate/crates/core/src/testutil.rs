//! Five-couple fixtures shared by unit tests.

use crate::format::parse_instance;
use crate::model::Profile;

pub const FIVE_PAIR_1: &str = include_str!("../../../fixtures/five_pair_1.txt");
const FIVE_PAIR_2: &str = include_str!("../../../fixtures/five_pair_2.txt");
const FIVE_PAIR_3: &str = include_str!("../../../fixtures/five_pair_3.txt");
const FIVE_PAIR_4: &str = include_str!("../../../fixtures/five_pair_4.txt");

pub struct FiveCouples {
    pub p: Profile,
    pub q1: Profile,
    pub q2: Profile,
    pub q3: Profile,
    pub q4: Profile,
}

pub fn five_couples() -> FiveCouples {
    let load = |text| parse_instance(text).expect("fixture parses");
    let one = load(FIVE_PAIR_1);
    FiveCouples {
        p: one.truth().unwrap().clone(),
        q1: one.stated().clone(),
        q2: load(FIVE_PAIR_2).stated().clone(),
        q3: load(FIVE_PAIR_3).stated().clone(),
        q4: load(FIVE_PAIR_4).stated().clone(),
    }
}

/// Matching from 1-based man / letter pairs, e.g. `[(1, 'a'), ...]`.
pub fn matching(pairs: &[(usize, char)]) -> crate::model::Matching {
    let pairs: Vec<_> = pairs
        .iter()
        .map(|&(m, w)| (m - 1, (w as u8 - b'a') as usize))
        .collect();
    crate::model::Matching::from_pairs(pairs.len(), &pairs).unwrap()
}
