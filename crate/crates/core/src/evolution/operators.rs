use rand::Rng;

use crate::rig::{BlendshapeRig, WeightVector};
use crate::{Error, Result};

/// The genes the GA may touch: unique core shapes, minus eye and pupil
/// shapes when those are disabled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneSpace {
    genes: Vec<usize>,
    len: usize,
}

impl GeneSpace {
    pub fn new(rig: &BlendshapeRig, disable_eyes: bool, disable_pupils: bool) -> Self {
        let genes = rig
            .unique_core_indices()
            .iter()
            .copied()
            .filter(|&i| {
                let t = rig.shape(i).tags;
                !(disable_eyes && t.eye) && !(disable_pupils && t.pupil)
            })
            .collect();
        GeneSpace {
            genes,
            len: rig.shape_count(),
        }
    }

    pub fn from_genes(genes: Vec<usize>, len: usize) -> Self {
        GeneSpace { genes, len }
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }

    pub fn shape_count(&self) -> usize {
        self.len
    }

    /// Copy of `w` with every non-gene entry zeroed.
    pub fn restrict(&self, w: &WeightVector) -> WeightVector {
        let mut out = WeightVector::zeros(self.len);
        for &i in &self.genes {
            out[i] = w[i];
        }
        out
    }

    pub fn differ(&self, a: &WeightVector, b: &WeightVector) -> bool {
        self.genes.iter().any(|&i| a[i] != b[i])
    }

    pub fn active(&self, w: &WeightVector) -> Vec<usize> {
        self.genes.iter().copied().filter(|&i| w[i] != 0.0).collect()
    }
}

/// Uniform crossover: each gene comes from `b` when a fair coin lands below
/// one half and from `a` otherwise.
pub fn crossover<R: Rng + ?Sized>(
    space: &GeneSpace,
    a: &WeightVector,
    b: &WeightVector,
    rng: &mut R,
) -> Result<WeightVector> {
    if !space.differ(a, b) {
        return Err(Error::invalid("crossover needs two non-identical parents"));
    }
    let mut child = WeightVector::zeros(space.len);
    for &i in &space.genes {
        child[i] = if rng.random::<f64>() < 0.5 { b[i] } else { a[i] };
    }
    Ok(child)
}

/// Crossover returning both complementary children of one coin sequence.
pub fn crossover_pair<R: Rng + ?Sized>(
    space: &GeneSpace,
    a: &WeightVector,
    b: &WeightVector,
    rng: &mut R,
) -> Result<(WeightVector, WeightVector)> {
    if !space.differ(a, b) {
        return Err(Error::invalid("crossover needs two non-identical parents"));
    }
    let mut first = WeightVector::zeros(space.len);
    let mut second = WeightVector::zeros(space.len);
    for &i in &space.genes {
        if rng.random::<f64>() < 0.5 {
            first[i] = b[i];
            second[i] = a[i];
        } else {
            first[i] = a[i];
            second[i] = b[i];
        }
    }
    Ok((first, second))
}

/// `k` distinct genes drawn by repeated uniform index sampling, rejecting repeats.
fn distinct_genes<R: Rng + ?Sized>(pool: &[usize], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > pool.len() {
        return Err(Error::invalid(format!(
            "cannot pick {k} distinct genes out of {}",
            pool.len()
        )));
    }
    let mut picked = Vec::with_capacity(k);
    while picked.len() < k {
        let g = pool[rng.random_range(0..pool.len())];
        if !picked.contains(&g) {
            picked.push(g);
        }
    }
    Ok(picked)
}

/// Redraws `m` distinct genes of `w` from `U[0, 1)`; returns the mutated
/// vector and the targeted shape indices.
pub fn mutate<R: Rng + ?Sized>(
    space: &GeneSpace,
    w: &WeightVector,
    m: usize,
    rng: &mut R,
) -> Result<(WeightVector, Vec<usize>)> {
    let targets = distinct_genes(&space.genes, m, rng)?;
    let mut out = space.restrict(w);
    for &i in &targets {
        out[i] = rng.random::<f64>();
    }
    Ok((out, targets))
}

/// Whole arithmetic recombination: per-gene mean of two or more vectors.
pub fn average(space: &GeneSpace, set: &[&WeightVector]) -> Result<WeightVector> {
    if set.len() < 2 {
        return Err(Error::invalid("averaging needs at least two vectors"));
    }
    let mut out = WeightVector::zeros(space.len);
    let s = set.len() as f64;
    for &i in &space.genes {
        out[i] = set.iter().map(|w| w[i]).sum::<f64>() / s;
    }
    Ok(out)
}

/// A fresh member with exactly `x` active genes drawn from `pool`, each with
/// a `U[0, 1)` weight. Returns the vector and its active shape indices.
pub fn random_from<R: Rng + ?Sized>(
    len: usize,
    pool: &[usize],
    x: usize,
    rng: &mut R,
) -> Result<(WeightVector, Vec<usize>)> {
    let active = distinct_genes(pool, x, rng)?;
    let mut out = WeightVector::zeros(len);
    for &i in &active {
        // A zero draw would silently deactivate the gene.
        let mut v = rng.random::<f64>();
        while v == 0.0 {
            v = rng.random::<f64>();
        }
        out[i] = v;
    }
    Ok((out, active))
}

pub fn random_member<R: Rng + ?Sized>(
    space: &GeneSpace,
    x: usize,
    rng: &mut R,
) -> Result<(WeightVector, Vec<usize>)> {
    random_from(space.len, &space.genes, x, rng)
}
