//! Preference lists, profiles, matchings and stability.
//!
//! Every index here is 0-based. A list held by a man ranks women and a list
//! held by a woman ranks men; [`PreferenceList`] itself does not know which.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Man,
    Woman,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Man => Side::Woman,
            Side::Woman => Side::Man,
        }
    }
}

/// A participant of an instance, identified by side and 0-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Person {
    pub side: Side,
    pub index: usize,
}

impl Person {
    pub fn man(index: usize) -> Self {
        Person { side: Side::Man, index }
    }

    pub fn woman(index: usize) -> Self {
        Person { side: Side::Woman, index }
    }
}

/// A complete, strict preference list: a permutation of `0..n`.
///
/// The inverse permutation is kept alongside the order so that comparisons
/// are constant time.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PreferenceList {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl PreferenceList {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, &entry) in order.iter().enumerate() {
            if entry >= n {
                return Err(Error::NotAPermutation {
                    size: n,
                    detail: format!("entry {entry} is out of range"),
                });
            }
            if rank[entry] != usize::MAX {
                return Err(Error::NotAPermutation {
                    size: n,
                    detail: format!("entry {entry} is repeated"),
                });
            }
            rank[entry] = pos;
        }
        Ok(PreferenceList { order, rank })
    }

    /// The list `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        PreferenceList {
            order: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    /// Builds a list from 1-based entries, the way lists are written by hand.
    pub fn from_one_based(entries: &[usize]) -> Result<Self> {
        let order = entries
            .iter()
            .map(|&e| {
                e.checked_sub(1).ok_or_else(|| Error::NotAPermutation {
                    size: entries.len(),
                    detail: "1-based entry 0".to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of `entry` in the list; 0 is the most preferred.
    pub fn rank_of(&self, entry: usize) -> Result<usize> {
        self.rank.get(entry).copied().ok_or(Error::IndexOutOfRange {
            index: entry,
            size: self.len(),
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.order.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied()
    }

    /// Unchecked strict comparison for hot loops; callers guarantee bounds.
    #[inline]
    pub(crate) fn ranks_above(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    #[inline]
    pub(crate) fn rank(&self, entry: usize) -> usize {
        self.rank[entry]
    }
}

impl fmt::Debug for PreferenceList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.order).finish()
    }
}

impl TryFrom<Vec<usize>> for PreferenceList {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        PreferenceList::new(order)
    }
}

impl From<PreferenceList> for Vec<usize> {
    fn from(list: PreferenceList) -> Self {
        list.order
    }
}

/// Strict preference: true iff `a` is ranked above `b` in `list`.
pub fn prefers(list: &PreferenceList, a: usize, b: usize) -> Result<bool> {
    Ok(list.rank_of(a)? < list.rank_of(b)?)
}

/// Moves the men of `tuple` to the front of `list`, in tuple order; the rest
/// keep their relative order.
pub fn promote(list: &PreferenceList, tuple: &[usize]) -> Result<PreferenceList> {
    let n = list.len();
    let mut in_tuple = vec![false; n];
    for &entry in tuple {
        if entry >= n {
            return Err(Error::IndexOutOfRange { index: entry, size: n });
        }
        if std::mem::replace(&mut in_tuple[entry], true) {
            return Err(Error::DuplicateEntry(entry));
        }
    }
    let order = tuple
        .iter()
        .copied()
        .chain(list.iter().filter(|&e| !in_tuple[e]))
        .collect();
    Ok(PreferenceList::new(order).expect("promotion preserves the permutation"))
}

/// The preference lists of all `n` men and `n` women.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    men: Vec<PreferenceList>,
    women: Vec<PreferenceList>,
}

impl Profile {
    pub fn new(men: Vec<PreferenceList>, women: Vec<PreferenceList>) -> Result<Self> {
        let n = men.len();
        if women.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: women.len(),
            });
        }
        if let Some(bad) = men.iter().chain(&women).find(|l| l.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Profile { men, women })
    }

    /// Builds a profile from 1-based rows; women are numbered too.
    pub fn from_one_based(men: &[&[usize]], women: &[&[usize]]) -> Result<Self> {
        let parse = |rows: &[&[usize]]| {
            rows.iter()
                .map(|r| PreferenceList::from_one_based(r))
                .collect::<Result<Vec<_>>>()
        };
        Profile::new(parse(men)?, parse(women)?)
    }

    pub fn size(&self) -> usize {
        self.men.len()
    }

    pub fn man_list(&self, man: usize) -> Result<&PreferenceList> {
        self.men.get(man).ok_or(Error::IndexOutOfRange {
            index: man,
            size: self.size(),
        })
    }

    pub fn woman_list(&self, woman: usize) -> Result<&PreferenceList> {
        self.women.get(woman).ok_or(Error::IndexOutOfRange {
            index: woman,
            size: self.size(),
        })
    }

    pub fn men_lists(&self) -> &[PreferenceList] {
        &self.men
    }

    pub fn women_lists(&self) -> &[PreferenceList] {
        &self.women
    }

    pub(crate) fn check_woman(&self, woman: usize) -> Result<()> {
        self.woman_list(woman).map(|_| ())
    }

    pub(crate) fn check_same_size(&self, other: &Profile) -> Result<()> {
        if self.size() == other.size() {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: self.size(),
                found: other.size(),
            })
        }
    }

    pub(crate) fn check_list(&self, list: &PreferenceList) -> Result<()> {
        if list.len() == self.size() {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: self.size(),
                found: list.len(),
            })
        }
    }
}

/// Copy of `profile` in which woman `woman` states `list` instead.
pub fn with_list(profile: &Profile, woman: usize, list: PreferenceList) -> Result<Profile> {
    profile.check_woman(woman)?;
    profile.check_list(&list)?;
    let mut next = profile.clone();
    next.women[woman] = list;
    Ok(next)
}

/// A perfect matching, stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Matching {
    man_to_woman: Vec<usize>,
    woman_to_man: Vec<usize>,
}

impl Matching {
    /// `man_to_woman[m]` is the partner of man `m`.
    pub fn from_men(man_to_woman: Vec<usize>) -> Result<Self> {
        let inverse = PreferenceList::new(man_to_woman)?;
        Ok(Matching {
            woman_to_man: inverse.rank,
            man_to_woman: inverse.order,
        })
    }

    /// Builds a matching from `(man, woman)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: pairs.len(),
            });
        }
        let mut man_to_woman = vec![usize::MAX; n];
        for &(m, w) in pairs {
            if m >= n {
                return Err(Error::IndexOutOfRange { index: m, size: n });
            }
            man_to_woman[m] = w;
        }
        Matching::from_men(man_to_woman)
    }

    pub fn size(&self) -> usize {
        self.man_to_woman.len()
    }

    pub fn woman_of(&self, man: usize) -> usize {
        self.man_to_woman[man]
    }

    pub fn man_of(&self, woman: usize) -> usize {
        self.woman_to_man[woman]
    }

    pub fn men(&self) -> &[usize] {
        &self.man_to_woman
    }

    pub fn women(&self) -> &[usize] {
        &self.woman_to_man
    }

    /// `(man, woman)` pairs ordered by man.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.man_to_woman.iter().copied().enumerate()
    }
}

impl TryFrom<Vec<usize>> for Matching {
    type Error = Error;

    fn try_from(man_to_woman: Vec<usize>) -> Result<Self> {
        Matching::from_men(man_to_woman)
    }
}

impl From<Matching> for Vec<usize> {
    fn from(m: Matching) -> Self {
        m.man_to_woman
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockingPair {
    pub man: usize,
    pub woman: usize,
}

/// All pairs that block `matching` under `profile`.
pub fn blocking_pairs(profile: &Profile, matching: &Matching) -> Result<BTreeSet<BlockingPair>> {
    if matching.size() != profile.size() {
        return Err(Error::SizeMismatch {
            expected: profile.size(),
            found: matching.size(),
        });
    }
    let mut out = BTreeSet::new();
    for (man, list) in profile.men.iter().enumerate() {
        let current = matching.woman_of(man);
        // Only women ranked above his partner can block with him.
        for &woman in &list.order[..list.rank(current)] {
            if profile.women[woman].ranks_above(man, matching.man_of(woman)) {
                out.insert(BlockingPair { man, woman });
            }
        }
    }
    Ok(out)
}

pub fn is_stable(profile: &Profile, matching: &Matching) -> Result<bool> {
    Ok(blocking_pairs(profile, matching)?.is_empty())
}

/// True iff `a` weakly dominates `b` for every man under `profile`.
pub fn men_weakly_prefer(profile: &Profile, a: &Matching, b: &Matching) -> bool {
    profile
        .men
        .iter()
        .enumerate()
        .all(|(m, list)| list.rank(a.woman_of(m)) <= list.rank(b.woman_of(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::five_couples;
    use proptest::prelude::*;

    fn one_based(entries: &[usize]) -> PreferenceList {
        PreferenceList::from_one_based(entries).unwrap()
    }

    fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    #[test]
    fn prefers_follows_rank() {
        // men are 1-based in the fixtures, so subtract one from each query
        let p_a = one_based(&[2, 1, 4, 5, 3]);
        assert!(prefers(&p_a, 1, 0).unwrap());
        let q2_d = one_based(&[5, 3, 4, 1, 2]);
        assert!(prefers(&q2_d, 0, 1).unwrap());
        for x in 0..5 {
            assert!(!prefers(&q2_d, x, x).unwrap());
        }
    }

    #[test]
    fn prefers_rejects_out_of_range() {
        let l = PreferenceList::identity(3);
        assert_eq!(
            prefers(&l, 3, 0),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        );
    }

    #[test]
    fn list_construction_rejects_non_permutations() {
        assert!(PreferenceList::new(vec![0, 0, 1]).is_err());
        assert!(PreferenceList::new(vec![0, 3, 1]).is_err());
        assert!(PreferenceList::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn promote_moves_tuple_to_front() {
        let l = one_based(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(promote(&l, &[4, 1]).unwrap(), one_based(&[5, 2, 1, 3, 4, 6]));
        assert_eq!(promote(&l, &[]).unwrap(), l);
        let short = one_based(&[1, 2, 3]);
        assert_eq!(promote(&short, &[2, 1, 0]).unwrap(), one_based(&[3, 2, 1]));
    }

    #[test]
    fn promote_rejects_bad_tuples() {
        let l = PreferenceList::identity(4);
        assert_eq!(promote(&l, &[1, 1]), Err(Error::DuplicateEntry(1)));
        assert_eq!(
            promote(&l, &[7]),
            Err(Error::IndexOutOfRange { index: 7, size: 4 })
        );
    }

    #[test]
    fn with_list_reproduces_example_rows() {
        let f = five_couples();
        let q2_d = f.q2.woman_list(3).unwrap().clone();
        assert_eq!(q2_d, one_based(&[5, 3, 4, 1, 2]));
        assert_eq!(with_list(&f.q1, 3, q2_d).unwrap(), f.q2);
        let p_b = f.p.woman_list(1).unwrap().clone();
        assert_eq!(with_list(&f.q3, 1, p_b).unwrap(), f.q4);
        let same = f.q1.woman_list(2).unwrap().clone();
        assert_eq!(with_list(&f.q1, 2, same).unwrap(), f.q1);
    }

    #[test]
    fn with_list_validates() {
        let f = five_couples();
        assert!(with_list(&f.q1, 5, PreferenceList::identity(5)).is_err());
        assert!(with_list(&f.q1, 0, PreferenceList::identity(4)).is_err());
    }

    #[test]
    fn example_blocking_pairs() {
        let f = five_couples();
        let mu_q3 = crate::engine::gs_m(&f.q3).matching;
        let pairs: Vec<_> = blocking_pairs(&f.p, &mu_q3)
            .unwrap()
            .into_iter()
            .map(|b| (b.man, b.woman))
            .collect();
        // (2,b) and (3,b)
        assert_eq!(pairs, vec![(1, 1), (2, 1)]);
        assert!(!is_stable(&f.p, &mu_q3).unwrap());

        let mu_p = crate::engine::gs_m(&f.p).matching;
        assert!(blocking_pairs(&f.p, &mu_p).unwrap().is_empty());
        assert!(is_stable(&f.p, &crate::engine::gs_m(&f.q1).matching).unwrap());
        assert!(is_stable(&f.p, &crate::engine::gs_m(&f.q2).matching).unwrap());
    }

    #[test]
    fn blocking_pairs_size_mismatch() {
        let f = five_couples();
        let m = Matching::from_men(vec![0, 1]).unwrap();
        assert!(blocking_pairs(&f.p, &m).is_err());
    }

    #[test]
    fn matching_from_pairs_checks_bijection() {
        assert!(Matching::from_pairs(2, &[(0, 1), (1, 1)]).is_err());
        let m = Matching::from_pairs(2, &[(1, 0), (0, 1)]).unwrap();
        assert_eq!(m.man_of(0), 1);
        assert_eq!(m.woman_of(0), 1);
    }

    fn scan_blocking(profile: &Profile, matching: &Matching) -> BTreeSet<BlockingPair> {
        let n = profile.size();
        let mut out = BTreeSet::new();
        for man in 0..n {
            for woman in 0..n {
                let m_list = profile.man_list(man).unwrap();
                let w_list = profile.woman_list(woman).unwrap();
                if prefers(m_list, woman, matching.woman_of(man)).unwrap()
                    && prefers(w_list, man, matching.man_of(woman)).unwrap()
                {
                    out.insert(BlockingPair { man, woman });
                }
            }
        }
        out
    }

    fn profile_strategy(n: usize) -> impl Strategy<Value = Profile> {
        (
            proptest::collection::vec(permutation(n), n),
            proptest::collection::vec(permutation(n), n),
        )
            .prop_map(|(men, women)| {
                let lists = |rows: Vec<Vec<usize>>| {
                    rows.into_iter()
                        .map(|r| PreferenceList::new(r).unwrap())
                        .collect()
                };
                Profile::new(lists(men), lists(women)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn rank_inverts_order(order in (1usize..12).prop_flat_map(permutation)) {
            let list = PreferenceList::new(order.clone()).unwrap();
            for (k, &e) in order.iter().enumerate() {
                prop_assert_eq!(list.rank_of(e).unwrap(), k);
            }
        }

        #[test]
        fn promote_keeps_remaining_order(
            (order, tuple) in (1usize..10).prop_flat_map(|n| {
                (permutation(n), permutation(n).prop_flat_map(move |p| {
                    (0..=n).prop_map(move |k| p[..k].to_vec())
                }))
            })
        ) {
            let list = PreferenceList::new(order.clone()).unwrap();
            let out = promote(&list, &tuple).unwrap();
            prop_assert_eq!(&out.order()[..tuple.len()], &tuple[..]);
            let rest: Vec<usize> = order.iter().copied().filter(|e| !tuple.contains(e)).collect();
            prop_assert_eq!(&out.order()[tuple.len()..], &rest[..]);
        }

        #[test]
        fn blocking_pairs_match_pairwise_scan(
            profile in profile_strategy(4),
            men in permutation(4),
        ) {
            let matching = Matching::from_men(men).unwrap();
            prop_assert_eq!(
                blocking_pairs(&profile, &matching).unwrap(),
                scan_blocking(&profile, &matching)
            );
        }

        #[test]
        fn with_list_touches_one_row(profile in profile_strategy(5), w in 0usize..5, l in permutation(5)) {
            let next = with_list(&profile, w, PreferenceList::new(l.clone()).unwrap()).unwrap();
            prop_assert_eq!(next.men_lists(), profile.men_lists());
            for v in 0..5 {
                if v == w {
                    prop_assert_eq!(next.woman_list(v).unwrap().order(), &l[..]);
                } else {
                    prop_assert_eq!(next.woman_list(v).unwrap(), profile.woman_list(v).unwrap());
                }
            }
        }
    }
}
