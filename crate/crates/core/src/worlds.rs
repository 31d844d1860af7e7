//! Worlds (total assignments) and exhaustive model enumeration/counting.
//!
//! Worlds are ordered as binary numbers with `x_1` as the most significant bit
//! and `false < true`. Every scan in the crate visits worlds in that order (or
//! partitions it into contiguous chunks that are merged back in order), so
//! "first world" tie-breaks never depend on thread scheduling.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{Theory, VarUniverse};

/// Hard ceiling imposed by the 64-bit world encoding.
pub const MAX_REPRESENTABLE_VARS: usize = 63;

/// Chunk length for partitioned scans; smaller scans run on the calling thread.
const CHUNK: u64 = 1 << 12;

/// Resource limits for exhaustive procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe that may be enumerated.
    pub n_max: usize,
    /// Largest pessimistic sub-population for mixed turnout.
    pub p_max: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { n_max: 24, p_max: 20 }
    }
}

impl Limits {
    pub fn check_vars(&self, n: usize) -> Result<()> {
        let max = self.n_max.min(MAX_REPRESENTABLE_VARS);
        if n > max {
            return Err(Error::VariableLimitExceeded { n, max });
        }
        Ok(())
    }
}

/// A total assignment. Bit `n-1-i` of `bits` holds variable `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    bits: u64,
    len: usize,
}

impl World {
    pub fn new(bits: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_REPRESENTABLE_VARS);
        debug_assert!(len == 64 || bits < (1u64 << len));
        Self { bits, len }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let bits = values.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Self::new(bits, values.len())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position in world order.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, var: usize) -> bool {
        debug_assert!(var < self.len);
        (self.bits >> (self.len - 1 - var)) & 1 == 1
    }

    /// Numeric view: `+1` for true, `-1` for false.
    pub fn sign(&self, var: usize) -> i8 {
        if self.get(var) {
            1
        } else {
            -1
        }
    }

    pub fn values(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Space-separated literals, e.g. `x1 !x2 x3`.
    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> DisplayWorld<'a> {
        DisplayWorld { world: self, universe }
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("World(")?;
        for b in self.values() {
            f.write_str(if b { "T" } else { "F" })?;
        }
        f.write_str(")")
    }
}

pub struct DisplayWorld<'a> {
    world: &'a World,
    universe: &'a VarUniverse,
}

impl fmt::Display for DisplayWorld<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.world.len() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if !self.world.get(i) {
                f.write_str("!")?;
            }
            f.write_str(self.universe.name(i))?;
        }
        Ok(())
    }
}

/// Model counts: the total and, per variable, how many models set it true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelCount {
    pub total: u64,
    pub per_variable_true: Vec<u64>,
}

impl ModelCount {
    fn zero(n: usize) -> Self {
        Self {
            total: 0,
            per_variable_true: vec![0; n],
        }
    }

    fn merge(mut self, other: ModelCount) -> Self {
        self.total += other.total;
        for (a, b) in self.per_variable_true.iter_mut().zip(other.per_variable_true) {
            *a += b;
        }
        self
    }
}

/// Number of worlds over `n` variables.
pub fn world_count(n: usize) -> u64 {
    1u64 << n
}

/// All worlds over `n` variables in world order.
pub fn all_worlds(n: usize) -> impl Iterator<Item = World> + Clone {
    (0..world_count(n)).map(move |bits| World::new(bits, n))
}

/// Splits the world range into contiguous chunks, maps each (possibly in
/// parallel) and returns the per-chunk results in world order.
pub(crate) fn scan_chunks<A, F>(n: usize, map: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    let total = world_count(n);
    if total <= CHUNK {
        return vec![map(0..total)];
    }
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| map(c * CHUNK..((c + 1) * CHUNK).min(total)))
        .collect()
}

/// Lazily iterates the models of `theory` in world order.
pub fn model_iter<'t>(theory: &'t Theory, limits: &Limits) -> Result<impl Iterator<Item = World> + 't> {
    limits.check_vars(theory.num_vars())?;
    Ok(all_worlds(theory.num_vars()).filter(move |w| theory.models(w)))
}

/// Every model of `theory`, in world order.
pub fn enumerate_models(theory: &Theory, limits: &Limits) -> Result<Vec<World>> {
    limits.check_vars(theory.num_vars())?;
    let n = theory.num_vars();
    let parts = scan_chunks(n, |range| {
        range
            .map(|bits| World::new(bits, n))
            .filter(|w| theory.models(w))
            .collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

pub fn count_models(theory: &Theory, limits: &Limits) -> Result<ModelCount> {
    limits.check_vars(theory.num_vars())?;
    let n = theory.num_vars();
    let parts = scan_chunks(n, |range| {
        let mut count = ModelCount::zero(n);
        for w in range.map(|bits| World::new(bits, n)).filter(|w| theory.models(w)) {
            count.total += 1;
            for (i, c) in count.per_variable_true.iter_mut().enumerate() {
                *c += w.get(i) as u64;
            }
        }
        count
    });
    Ok(parts.into_iter().fold(ModelCount::zero(n), ModelCount::merge))
}

/// First model in world order, if any.
pub fn first_model(theory: &Theory, limits: &Limits) -> Result<Option<World>> {
    limits.check_vars(theory.num_vars())?;
    let n = theory.num_vars();
    let total = world_count(n);
    if total <= CHUNK {
        return Ok(all_worlds(n).find(|w| theory.models(w)));
    }
    Ok((0..total)
        .into_par_iter()
        .map(|bits| World::new(bits, n))
        .find_first(|w| theory.models(w)))
}

pub fn is_satisfiable(theory: &Theory, limits: &Limits) -> Result<bool> {
    Ok(first_model(theory, limits)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    fn theory(names: &[&str], statements: &[&str]) -> Theory {
        let u = VarUniverse::new(names.iter().copied()).unwrap();
        let fs = statements.iter().map(|s| Formula::parse(s, &u).unwrap()).collect();
        Theory::with_statements(u, fs).unwrap()
    }

    fn bools(w: &World) -> Vec<bool> {
        w.values().collect()
    }

    #[test]
    fn world_bit_layout() {
        let w = World::from_bools(&[true, false, false]);
        assert_eq!(w.bits(), 0b100);
        assert!(w.get(0) && !w.get(1) && !w.get(2));
        assert_eq!(w.sign(0), 1);
        assert_eq!(w.sign(2), -1);
    }

    #[test]
    fn enumerate_examples() {
        let l = Limits::default();
        let single = enumerate_models(&theory(&["x1"], &["x1"]), &l).unwrap();
        assert_eq!(single.iter().map(bools).collect::<Vec<_>>(), vec![vec![true]]);

        let all = enumerate_models(&theory(&["x1", "x2"], &[]), &l).unwrap();
        assert_eq!(
            all.iter().map(bools).collect::<Vec<_>>(),
            vec![
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true]
            ]
        );

        let disj = enumerate_models(&theory(&["x1", "x2"], &["x1 | x2"]), &l).unwrap();
        assert_eq!(
            disj.iter().map(bools).collect::<Vec<_>>(),
            vec![vec![false, true], vec![true, false], vec![true, true]]
        );
    }

    #[test]
    fn count_examples() {
        let l = Limits::default();
        let c = count_models(&theory(&["x1", "x2", "x3"], &[]), &l).unwrap();
        assert_eq!(
            c,
            ModelCount {
                total: 8,
                per_variable_true: vec![4, 4, 4]
            }
        );
        let c = count_models(&theory(&["x1", "x2"], &["x1 & x2"]), &l).unwrap();
        assert_eq!(
            c,
            ModelCount {
                total: 1,
                per_variable_true: vec![1, 1]
            }
        );
        let c = count_models(&theory(&["x1", "x2"], &["x1 | x2"]), &l).unwrap();
        assert_eq!(
            c,
            ModelCount {
                total: 3,
                per_variable_true: vec![2, 2]
            }
        );
    }

    #[test]
    fn satisfiability_examples() {
        let l = Limits::default();
        assert!(!is_satisfiable(&theory(&["x1"], &["x1", "!x1"]), &l).unwrap());
        assert!(is_satisfiable(&theory(&["x1"], &[]), &l).unwrap());
        assert!(!is_satisfiable(&theory(&["x1", "x2"], &["x1 -> x2", "x1", "!x2"]), &l).unwrap());
    }

    #[test]
    fn limit_is_enforced() {
        let l = Limits { n_max: 2, p_max: 20 };
        let t = theory(&["a", "b", "c"], &[]);
        assert_eq!(count_models(&t, &l), Err(Error::VariableLimitExceeded { n: 3, max: 2 }));
        assert!(enumerate_models(&t, &l).is_err());
        assert!(is_satisfiable(&t, &l).is_err());
    }

    #[test]
    fn chunked_scan_matches_sequential_order() {
        // 15 variables spans several chunks.
        let names: Vec<String> = (1..=15).map(|i| format!("x{i}")).collect();
        let u = VarUniverse::new(names.clone()).unwrap();
        let f = Formula::parse("(x1 | x7) & !(x3 & x15) & (x2 <-> x9)", &u).unwrap();
        let t = Theory::with_statements(u, vec![f]).unwrap();
        let l = Limits::default();
        let par = enumerate_models(&t, &l).unwrap();
        let seq: Vec<World> = model_iter(&t, &l).unwrap().collect();
        assert_eq!(par, seq);
        let count = count_models(&t, &l).unwrap();
        assert_eq!(count.total as usize, seq.len());
        assert_eq!(first_model(&t, &l).unwrap(), seq.first().copied());
    }

    #[test]
    fn empty_universe_has_one_world() {
        let t = theory(&[], &[]);
        let models = enumerate_models(&t, &Limits::default()).unwrap();
        assert_eq!(models.len(), 1);
        let t = theory(&[], &["false"]);
        assert!(!is_satisfiable(&t, &Limits::default()).unwrap());
    }
}
