//! Recursive-matrix random edge generator.
//!
//! Each edge picks one quadrant per bit level with probabilities
//! `(a, b, c, d = 1 - a - b - c)`, accumulating one source and one target
//! bit per level. Output may contain duplicate pairs and self loops; the
//! stream is a pure function of the seed.

use streamgraph_core::hash64::SplitMix64;

use crate::CliError;

#[derive(Clone, Copy, Debug)]
pub struct RmatParams {
    pub log_n: u32,
    pub m: u64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub seed: u64,
}

impl RmatParams {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.log_n > 30 {
            return Err(CliError::Invalid("rmat: log_n must be <= 30".into()));
        }
        let probs = [self.a, self.b, self.c];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || self.a + self.b + self.c > 1.0 {
            return Err(CliError::Invalid(
                "rmat: probabilities must be nonnegative with a+b+c <= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.log_n
    }
}

pub fn generate(params: &RmatParams) -> Result<Vec<(u64, u64)>, CliError> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);
    let ab = params.a + params.b;
    let abc = ab + params.c;
    let mut out = Vec::with_capacity(params.m as usize);
    for _ in 0..params.m {
        let mut u = 0u64;
        let mut v = 0u64;
        for _ in 0..params.log_n {
            let r = rng.next_f64();
            let (ubit, vbit) = if r < params.a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            u = (u << 1) | ubit;
            v = (v << 1) | vbit;
        }
        out.push((u, v));
    }
    Ok(out)
}

/// Sorted-and-deduplicated adjacency lists over the full id space
/// `[0, 2^log_n)`, optionally with both edge directions.
pub fn to_adjacency(params: &RmatParams, symmetrize: bool) -> Result<Vec<Vec<u64>>, CliError> {
    let edges = generate(params)?;
    let n = params.vertex_count() as usize;
    let mut adj: Vec<Vec<u64>> = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u as usize].push(v);
        if symmetrize {
            adj[v as usize].push(u);
        }
    }
    for ns in &mut adj {
        ns.sort_unstable();
        ns.dedup();
    }
    Ok(adj)
}
