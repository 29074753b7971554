use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{invalid_argument, invalid_input, Error, Result};
use crate::rng::substream;
use crate::signal::Dataset;

const SPLIT_STREAM: u64 = 0x5B1;
const SUBSAMPLE_STREAM: u64 = 0x5B5;

/// Frame indices grouped by `(label, snr_db)`, each group in dataset order.
pub fn strata(ds: &Dataset) -> BTreeMap<(u8, i8), Vec<usize>> {
    let mut map: BTreeMap<(u8, i8), Vec<usize>> = BTreeMap::new();
    for (i, f) in ds.frames().iter().enumerate() {
        map.entry((f.label, f.snr_db)).or_default().push(i);
    }
    map
}

fn stratum_stream(stream: u64, key: (u8, i8)) -> [u64; 3] {
    [stream, key.0 as u64, key.1 as i64 as u64]
}

/// Picks `take` indices of every stratum at random; the result keeps
/// dataset order.
fn select(
    ds: &Dataset,
    seed: u64,
    stream: u64,
    take: impl Fn((u8, i8), usize) -> Result<usize>,
) -> Result<Vec<bool>> {
    let mut chosen = vec![false; ds.len()];
    for (key, mut idx) in strata(ds) {
        let k = take(key, idx.len())?;
        idx.shuffle(&mut substream(seed, &stratum_stream(stream, key)));
        for &i in &idx[..k] {
            chosen[i] = true;
        }
    }
    Ok(chosen)
}

fn partition(ds: &Dataset, chosen: &[bool], tag: &str) -> Result<(Dataset, Dataset)> {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (f, &c) in ds.frames().iter().zip(chosen) {
        if c {
            a.push(f.clone());
        } else {
            b.push(f.clone());
        }
    }
    Ok((
        ds.with_frames(a, format!("{}; {tag} side A", ds.provenance))?,
        ds.with_frames(b, format!("{}; {tag} side B", ds.provenance))?,
    ))
}

/// Stratified 50/50 split: every `(class, snr)` stratum gives exactly half
/// its frames to each side.
pub fn split_dataset(ds: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    if ds.is_empty() {
        return Err(invalid_input("cannot split an empty dataset"));
    }
    let chosen = select(ds, seed, SPLIT_STREAM, |key, n| {
        if n % 2 != 0 {
            Err(invalid_input(format!(
                "stratum (label {}, snr {} dB) has odd count {n}",
                key.0, key.1
            )))
        } else {
            Ok(n / 2)
        }
    })?;
    let (mut train, mut test) = partition(ds, &chosen, "split")?;
    train.provenance = format!("{}; train split seed={seed}", ds.provenance);
    test.provenance = format!("{}; test split seed={seed}", ds.provenance);
    Ok((train, test))
}

/// Stratum sample sizes for a subsample of `fraction`: the total is
/// `fraction * N` rounded half to even, and each stratum gets the floor or
/// the ceiling of its own share (largest remainder first, ties in a
/// seeded order).
pub fn stratum_quotas(fraction: f64, sizes: &[usize], seed: u64) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    let want = (fraction * total as f64).round_ties_even() as usize;
    let shares: Vec<f64> = sizes.iter().map(|&n| fraction * n as f64).collect();
    let mut quotas: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.shuffle(&mut substream(seed, &[SUBSAMPLE_STREAM]));
    order.sort_by(|&a, &b| {
        (shares[b] - shares[b].floor()).total_cmp(&(shares[a] - shares[a].floor()))
    });
    let mut extra = want.saturating_sub(quotas.iter().sum());
    for i in order {
        if extra == 0 {
            break;
        }
        if quotas[i] < sizes[i] {
            quotas[i] += 1;
            extra -= 1;
        }
    }
    quotas
}

/// Stratified random subset sized by [`stratum_quotas`].
pub fn subsample(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid_argument(format!(
            "fraction {fraction} outside (0, 1]"
        )));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let groups = strata(ds);
    let sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    let quotas: BTreeMap<(u8, i8), usize> = groups
        .keys()
        .copied()
        .zip(stratum_quotas(fraction, &sizes, seed))
        .collect();
    let chosen = select(ds, seed, SUBSAMPLE_STREAM, |key, n| match quotas[&key] {
        0 => Err(Error::Degenerate(format!(
            "fraction {fraction} leaves stratum (label {}, snr {} dB) of {n} frames empty",
            key.0, key.1
        ))),
        k => Ok(k),
    })?;
    let (mut kept, _) = partition(ds, &chosen, "subsample")?;
    kept.provenance = format!(
        "{}; subsample fraction={fraction} seed={seed}",
        ds.provenance
    );
    Ok(kept)
}
