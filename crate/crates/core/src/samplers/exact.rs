//! Exhaustive enumerators used as oracles for small sizes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::trees::{parse_cotree, parse_unordered, Cotree, UnorderedTree};

pub const MAX_UNLABELLED_LEAVES: usize = 12;
pub const MAX_LABELLED_LEAVES: usize = 8;

/// All unlabelled trees with `n` leaves and internal outdegree ≥ 2, in
/// canonical form and sorted by canonical string.
///
/// A tree with `n ≥ 2` leaves is a multiset of at least two smaller trees.
/// Multisets are generated as non-increasing sequences of (size, index)
/// pairs, so each appears once.
pub fn enumerate_unlabelled_trees(n: usize) -> Result<Vec<UnorderedTree>> {
    if n == 0 || n > MAX_UNLABELLED_LEAVES {
        return Err(Error::OutOfRange(format!(
            "exhaustive enumeration needs 1 ≤ n ≤ {MAX_UNLABELLED_LEAVES}, got {n}"
        )));
    }
    let strings = unlabelled_strings(n);
    strings[n].iter().map(|s| parse_unordered(s)).collect()
}

/// Canonical strings of the trees of every size up to `n`.
fn unlabelled_strings(n: usize) -> Vec<Vec<String>> {
    let mut by_size: Vec<Vec<String>> = vec![Vec::new(); n + 1];
    if n >= 1 {
        by_size[1].push("*".to_string());
    }
    for size in 2..=n {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        multisets(&by_size, size, (size - 1, usize::MAX), &mut parts, &mut out);
        out.sort_unstable();
        by_size[size] = out;
    }
    by_size
}

/// Extends `parts` by non-increasing (size, index) pairs bounded by `max`
/// until their sizes sum to `remaining`; records multisets with ≥ 2 parts.
fn multisets(
    by_size: &[Vec<String>],
    remaining: usize,
    max: (usize, usize),
    parts: &mut Vec<(usize, usize)>,
    out: &mut Vec<String>,
) {
    if remaining == 0 {
        if parts.len() >= 2 {
            let mut strs: Vec<&str> = parts.iter().map(|&(s, i)| by_size[s][i].as_str()).collect();
            strs.sort_unstable();
            out.push(format!("({})", strs.join(",")));
        }
        return;
    }
    for size in (1..=remaining.min(max.0)).rev() {
        if by_size[size].is_empty() {
            continue;
        }
        let last = by_size[size].len() - 1;
        let top = if size == max.0 { max.1.min(last) } else { last };
        for idx in (0..=top).rev() {
            parts.push((size, idx));
            multisets(by_size, remaining - size, (size, idx), parts, out);
            parts.pop();
        }
    }
}

/// All labelled cotrees with leaves `1..=n`, in canonical form.
///
/// Works on vertex sets: a tree on a set `S` with `|S| ≥ 2` is a set
/// partition of `S` into at least two blocks, each carrying a tree whose
/// root has the opposite sign.
pub fn enumerate_labelled_cotrees(n: usize) -> Result<Vec<Cotree>> {
    if n == 0 || n > MAX_LABELLED_LEAVES {
        return Err(Error::OutOfRange(format!(
            "exhaustive enumeration needs 1 ≤ n ≤ {MAX_LABELLED_LEAVES}, got {n}"
        )));
    }
    let full = (1u32 << n) - 1;
    let mut memo: HashMap<(u32, bool), Vec<String>> = HashMap::new();
    let mut all = trees_on(full, true, &mut memo);
    if n >= 2 {
        all.extend(trees_on(full, false, &mut memo));
    }
    all.sort_unstable();
    all.iter().map(|s| parse_cotree(s)?.into_cotree()).collect()
}

fn trees_on(set: u32, plus: bool, memo: &mut HashMap<(u32, bool), Vec<String>>) -> Vec<String> {
    if set.count_ones() == 1 {
        return vec![(set.trailing_zeros() + 1).to_string()];
    }
    if let Some(v) = memo.get(&(set, plus)) {
        return v.clone();
    }
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    partitions(set, plus, &mut blocks, memo, &mut out);
    memo.insert((set, plus), out.clone());
    out
}

/// Set partitions of `rest` into blocks; the block holding the lowest
/// remaining element is chosen first, so each partition appears once.
fn partitions(
    rest: u32,
    plus: bool,
    blocks: &mut Vec<u32>,
    memo: &mut HashMap<(u32, bool), Vec<String>>,
    out: &mut Vec<String>,
) {
    if rest == 0 {
        if blocks.len() < 2 {
            return;
        }
        let mut choices: Vec<Vec<String>> = Vec::with_capacity(blocks.len());
        for &b in blocks.iter() {
            choices.push(trees_on(b, !plus, memo));
        }
        let sign = if plus { '+' } else { '-' };
        let mut idx = vec![0usize; choices.len()];
        loop {
            let mut parts: Vec<&str> = idx.iter().zip(&choices).map(|(&i, c)| c[i].as_str()).collect();
            parts.sort_unstable();
            out.push(format!("{sign}({})", parts.join(",")));
            let mut j = 0;
            loop {
                if j == idx.len() {
                    return;
                }
                idx[j] += 1;
                if idx[j] < choices[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }
    let low = rest & rest.wrapping_neg();
    let others = rest & !low;
    // every subset of `others` joined with `low`
    let mut sub = others;
    loop {
        let block = sub | low;
        blocks.push(block);
        partitions(rest & !block, plus, blocks, memo, out);
        blocks.pop();
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & others;
    }
}
