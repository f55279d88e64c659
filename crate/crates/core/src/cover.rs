//! Minimum set cover over small universes: greedy and exact
//! branch-and-bound.

/// Fixed-width bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Self::empty(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn difference(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

/// Greedy cover: repeatedly takes the set covering the most uncovered
/// elements (lowest index on ties). Returns set indices, or `None` if the
/// sets do not cover the universe.
pub fn greedy_cover(universe: usize, sets: &[Bits]) -> Option<Vec<usize>> {
    let mut uncovered = Bits::full(universe);
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(k, s)| (k, s.intersection_count(&uncovered)))
            .fold((usize::MAX, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if gain == 0 {
            return None;
        }
        chosen.push(best);
        uncovered = uncovered.difference(&sets[best]);
    }
    Some(chosen)
}

/// Exact minimum cover by depth-first branch-and-bound, seeded with the
/// greedy solution as the incumbent. Returns set indices in ascending
/// order, or `None` if no cover exists.
pub fn exact_cover(universe: usize, sets: &[Bits]) -> Option<Vec<usize>> {
    let incumbent = greedy_cover(universe, sets)?;
    if incumbent.len() <= 1 {
        return Some(incumbent);
    }
    // Drop sets dominated by an earlier-or-larger set; keeps the lowest
    // index among equal sets.
    let mut kept: Vec<usize> = Vec::new();
    'outer: for (k, s) in sets.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        for (j, t) in sets.iter().enumerate() {
            if j != k && s.is_subset(t) && (!t.is_subset(s) || j < k) {
                continue 'outer;
            }
        }
        kept.push(k);
    }
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); universe];
    for &k in &kept {
        for e in sets[k].iter() {
            containing[e].push(k);
        }
    }
    let max_size = kept.iter().map(|&k| sets[k].count()).max().unwrap_or(1);
    let mut search = Search {
        sets,
        containing: &containing,
        max_size,
        best: incumbent,
        chosen: Vec::new(),
    };
    search.branch(&Bits::full(universe));
    let mut best = search.best;
    best.sort_unstable();
    Some(best)
}

struct Search<'a> {
    sets: &'a [Bits],
    containing: &'a [Vec<usize>],
    max_size: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn branch(&mut self, uncovered: &Bits) {
        let remaining = uncovered.count();
        if remaining == 0 {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let bound = remaining.div_ceil(self.max_size);
        if self.chosen.len() + bound >= self.best.len() {
            return;
        }
        // Branch on the uncovered element with the fewest covering sets.
        let pivot = uncovered
            .iter()
            .min_by_key(|&e| self.containing[e].len())
            .expect("nonempty");
        let mut options: Vec<(usize, usize)> = self.containing[pivot]
            .iter()
            .map(|&k| (k, self.sets[k].intersection_count(uncovered)))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (k, _) in options {
            self.chosen.push(k);
            let next = uncovered.difference(&self.sets[k]);
            self.branch(&next);
            self.chosen.pop();
        }
    }
}
