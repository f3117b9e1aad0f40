//! Seeded random instances. The same seed always yields the same corpus.

use rand::seq::SliceRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{PreferenceList, Profile};

pub fn random_list<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PreferenceList {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    PreferenceList::new(order).expect("shuffled identity")
}

pub fn random_profile<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Profile {
    let men = (0..n).map(|_| random_list(n, rng)).collect();
    let women = (0..n).map(|_| random_list(n, rng)).collect();
    Profile::new(men, women).expect("square by construction")
}

/// A true profile and a stated one in which men are truthful and each woman
/// either tells the truth or states a random list, with equal odds.
pub fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Profile, Profile) {
    let truth = random_profile(n, rng);
    let women = truth
        .women_lists()
        .iter()
        .map(|l| {
            if rng.random_bool(0.5) {
                l.clone()
            } else {
                random_list(n, rng)
            }
        })
        .collect();
    let stated = Profile::new(truth.men_lists().to_vec(), women).expect("same size");
    (truth, stated)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn profiles(seed: u64, n: usize, count: usize) -> Vec<Profile> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_profile(n, &mut rng)).collect()
}

pub fn pairs(seed: u64, n: usize, count: usize) -> Vec<(Profile, Profile)> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_pair(n, &mut rng)).collect()
}
