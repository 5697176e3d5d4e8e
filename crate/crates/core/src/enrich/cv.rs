use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{extract_rules, Enricher, EnrichmentResult};
use crate::error::{Error, Result};
use crate::expr::ExprTree;

const FOLD_SEED: u64 = 0x6d61_7468_7365_656b;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub size: usize,
    pub exact_matches: usize,
    pub exact_rate: f64,
    pub mean_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub pairs: usize,
    pub folds: Vec<FoldReport>,
    pub exact_rate: f64,
    pub mean_coverage: f64,
}

impl CvReport {
    pub fn table(&self) -> String {
        let mut out = String::from("fold\tsize\texact\texact_rate\tmean_coverage\n");
        for f in &self.folds {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.4}\t{:.4}\n",
                f.fold, f.size, f.exact_matches, f.exact_rate, f.mean_coverage
            ));
        }
        out.push_str(&format!(
            "all\t{}\t-\t{:.4}\t{:.4}\n",
            self.pairs, self.exact_rate, self.mean_coverage
        ));
        out
    }
}

/// Fold of each of `n` items. Items are shuffled with a fixed seed and
/// dealt round-robin, so fold sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {n} pairs"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(FOLD_SEED));
    let mut fold = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        fold[i] = rank % k;
    }
    Ok(fold)
}

/// Converts every pair's presentation tree with rules learned from the
/// other folds. Results come back in input order with their fold.
pub fn cross_convert(
    pairs: &[(ExprTree, ExprTree)],
    k: usize,
) -> Result<Vec<(usize, EnrichmentResult)>> {
    let folds = fold_assignment(pairs.len(), k)?;
    let mut out: Vec<Option<(usize, EnrichmentResult)>> = vec![None; pairs.len()];
    for f in 0..k {
        let train: Vec<(ExprTree, ExprTree)> = pairs
            .iter()
            .zip(&folds)
            .filter(|(_, &g)| g != f)
            .map(|(p, _)| p.clone())
            .collect();
        let rules = extract_rules(&train);
        let enricher = Enricher::new(&rules);
        for (i, (p, _)) in pairs.iter().enumerate() {
            if folds[i] == f {
                out[i] = Some((f, enricher.apply(p)));
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|r| r.expect("every pair has a fold"))
        .collect())
}

pub fn cross_validate(pairs: &[(ExprTree, ExprTree)], k: usize) -> Result<CvReport> {
    let results = cross_convert(pairs, k)?;
    let mut folds: Vec<FoldReport> = (0..k)
        .map(|fold| FoldReport {
            fold,
            size: 0,
            exact_matches: 0,
            exact_rate: 0.0,
            mean_coverage: 0.0,
        })
        .collect();
    let mut exact_total = 0;
    let mut coverage_total = 0.0;
    for ((fold, result), (_, gold)) in results.iter().zip(pairs) {
        let f = &mut folds[*fold];
        f.size += 1;
        f.mean_coverage += result.coverage;
        coverage_total += result.coverage;
        if result.ctree.root == gold.root {
            f.exact_matches += 1;
            exact_total += 1;
        }
    }
    for f in &mut folds {
        f.exact_rate = f.exact_matches as f64 / f.size as f64;
        f.mean_coverage /= f.size as f64;
    }
    let n = pairs.len() as f64;
    Ok(CvReport {
        pairs: pairs.len(),
        folds,
        exact_rate: exact_total as f64 / n,
        mean_coverage: coverage_total / n,
    })
}
