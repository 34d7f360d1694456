//! Noncrossing partitions of `{1..n}`: crossing test, enumeration,
//! refinement order and the Kreweras complement.
//!
//! Partitions are stored as restricted growth strings: element `i` carries
//! the label of its block, and blocks are labelled in order of their minimum
//! element. That encoding is canonical, so derived equality is structural.

use crate::error::{Error, Result};

/// Largest ground set accepted by [`enumerate_nc`].
pub const MAX_ENUMERATION: usize = 14;

/// An arbitrary set partition of `{1..n}` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u8>,
}

impl SetPartition {
    /// Builds a partition from 1-based blocks. The blocks must be nonempty,
    /// disjoint and cover `{1..n}`.
    pub fn new(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("ground set must be nonempty"));
        }
        if n > u8::MAX as usize {
            return Err(Error::Resource(format!("ground set size {n} too large")));
        }
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::domain("partition has an empty block"));
            }
            for &e in block {
                if e == 0 || e > n {
                    return Err(Error::domain(format!("element {e} outside 1..={n}")));
                }
                if owner[e - 1] != usize::MAX {
                    return Err(Error::domain(format!("element {e} appears twice")));
                }
                owner[e - 1] = b;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::domain(format!(
                "element {} is not covered",
                missing + 1
            )));
        }
        Ok(Self::from_owner(&owner))
    }

    fn from_owner(owner: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let labels = owner
            .iter()
            .map(|o| {
                let next = relabel.len() as u8;
                *relabel.entry(*o).or_insert(next)
            })
            .collect();
        SetPartition { labels }
    }

    /// All singletons `{{1},...,{n}}`.
    pub fn singletons(n: usize) -> Self {
        SetPartition {
            labels: (0..n as u8).collect(),
        }
    }

    /// One block `{1..n}`.
    pub fn full(n: usize) -> Self {
        SetPartition {
            labels: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Blocks as sorted 1-based element lists, ordered by minimum element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i + 1);
        }
        out
    }

    /// Block sizes in block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.block_count()];
        for &l in &self.labels {
            out[l as usize] += 1;
        }
        out
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.labels[i - 1] == self.labels[j - 1]
    }
}

/// Element of `NC(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition(SetPartition);

impl NoncrossingPartition {
    pub fn new(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        Self::try_from(SetPartition::new(n, blocks)?)
    }

    pub fn singletons(n: usize) -> Self {
        NoncrossingPartition(SetPartition::singletons(n))
    }

    pub fn full(n: usize) -> Self {
        NoncrossingPartition(SetPartition::full(n))
    }

    pub fn as_set_partition(&self) -> &SetPartition {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn block_count(&self) -> usize {
        self.0.block_count()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.0.blocks()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.0.block_sizes()
    }
}

impl TryFrom<SetPartition> for NoncrossingPartition {
    type Error = Error;

    fn try_from(p: SetPartition) -> Result<Self> {
        if is_noncrossing(&p) {
            Ok(NoncrossingPartition(p))
        } else {
            Err(Error::domain(format!("{:?} is crossing", p.blocks())))
        }
    }
}

/// True iff no `i < j < k < l` has `i ~ k`, `j ~ l` with `i` and `j` in
/// different blocks.
///
/// Linear scan with a stack of open blocks: entering an element whose block
/// is open but not on top of the stack means some block opened later is
/// still unfinished, which is exactly a crossing.
pub fn is_noncrossing(p: &SetPartition) -> bool {
    let n = p.n();
    let mut last = vec![0usize; p.block_count()];
    for (i, &l) in p.labels.iter().enumerate() {
        last[l as usize] = i;
    }
    let mut stack: Vec<u8> = Vec::new();
    for (i, &l) in p.labels.iter().enumerate() {
        match stack.last() {
            Some(&top) if top == l => {}
            _ => {
                if stack.contains(&l) {
                    return false;
                }
                stack.push(l);
            }
        }
        if last[l as usize] == i {
            stack.pop();
        }
    }
    debug_assert!(stack.is_empty() || n == 0);
    true
}

/// Convenience wrapper validating raw 1-based blocks first.
pub fn is_noncrossing_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    Ok(is_noncrossing(&SetPartition::new(n, blocks)?))
}

/// Visits every element of `NC(n)` in lexicographic order of the
/// restricted growth string.
pub fn for_each_nc<F: FnMut(&NoncrossingPartition)>(n: usize, mut f: F) -> Result<()> {
    check_enumeration_bound(n)?;
    let mut labels = vec![0u8; n];
    // Open blocks form a stack; an element may join any open block, which
    // closes every block opened after it, or start a new block.
    let mut stack: Vec<u8> = Vec::with_capacity(n);
    let mut out = NoncrossingPartition(SetPartition {
        labels: vec![0; n],
    });
    fn rec<F: FnMut(&NoncrossingPartition)>(
        i: usize,
        next_label: u8,
        labels: &mut Vec<u8>,
        stack: &mut Vec<u8>,
        out: &mut NoncrossingPartition,
        f: &mut F,
    ) {
        let n = labels.len();
        if i == n {
            out.0.labels.copy_from_slice(labels);
            f(out);
            return;
        }
        // Stack entries are increasing labels, so scanning bottom to top
        // yields candidates in increasing label order.
        for depth in 0..stack.len() {
            let l = stack[depth];
            let saved: Vec<u8> = stack[depth + 1..].to_vec();
            stack.truncate(depth + 1);
            labels[i] = l;
            rec(i + 1, next_label, labels, stack, out, f);
            stack.extend_from_slice(&saved);
        }
        labels[i] = next_label;
        stack.push(next_label);
        rec(i + 1, next_label + 1, labels, stack, out, f);
        stack.pop();
    }
    if n == 0 {
        return Ok(());
    }
    rec(0, 0, &mut labels, &mut stack, &mut out, &mut f);
    Ok(())
}

/// All of `NC(n)`, `1 <= n <= 14`, in lexicographic order.
pub fn enumerate_nc(n: usize) -> Result<Vec<NoncrossingPartition>> {
    let mut out = Vec::new();
    for_each_nc(n, |p| out.push(p.clone()))?;
    Ok(out)
}

fn check_enumeration_bound(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUMERATION {
        return Err(Error::Resource(format!(
            "enumeration of NC({n}) outside 1..={MAX_ENUMERATION}"
        )));
    }
    Ok(())
}

/// Kreweras complement, with barred point `i` (between `i` and `i+1`)
/// relabelled `i`.
///
/// Uses the permutation form `K(p) = p^{-1} o gamma` where `p` sends each
/// element to the next element of its block (cyclically) and `gamma` is the
/// long cycle `i -> i+1 mod n`.
pub fn kreweras(p: &NoncrossingPartition) -> NoncrossingPartition {
    let n = p.n();
    let mut prev = vec![0usize; n];
    for block in p.blocks() {
        let len = block.len();
        for (idx, &e) in block.iter().enumerate() {
            prev[e - 1] = block[(idx + len - 1) % len] - 1;
        }
    }
    // sigma(i) = prev(i + 1 mod n); its cycles are the blocks of K(p).
    let mut owner = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if owner[start] != usize::MAX {
            continue;
        }
        let mut i = start;
        while owner[i] == usize::MAX {
            owner[i] = count;
            i = prev[(i + 1) % n];
        }
        count += 1;
    }
    NoncrossingPartition(SetPartition::from_owner(&owner))
}

/// True iff every block of `p` lies inside a block of `q`.
pub fn refines(p: &NoncrossingPartition, q: &SetPartition) -> Result<bool> {
    let p = p.as_set_partition();
    if p.n() != q.n() {
        return Err(Error::domain(format!(
            "ground sets differ: {} vs {}",
            p.n(),
            q.n()
        )));
    }
    let mut image = vec![u8::MAX; p.block_count()];
    for (&lp, &lq) in p.labels.iter().zip(&q.labels) {
        let slot = &mut image[lp as usize];
        if *slot == u8::MAX {
            *slot = lq;
        } else if *slot != lq {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `n`-th Catalan number.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}
