//! Threshold functions and f-reduction of labelled trees.
//!
//! The thresholds are
//!
//! ```text
//! R_i(q,s,k)     = q * N_i(q,s,k)^s
//! N_0(q,s,k)     = 2^k + 1
//! N_{i+1}(q,s,k) = 2^k * (R_i(q,s,k) + 1)^{N_i(q,s,k)}
//! ```
//!
//! A node at level `i+1` keeps at most `R_i` pairwise l-isomorphic limbs.
//! `N_2` is already far beyond anything representable, so values are
//! computed with saturation at a cap.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::tree::{CanonicalCode, LabelledTree, NodeId};

/// Default limit on the bit length of exact big-number results.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("value needs more than {budget} bits")]
    BitBudget { budget: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `min(exact, cap)` plus whether `exact > cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capped {
    value: BigUint,
    saturated: bool,
}

impl Capped {
    fn new(exact: BigUint, cap: &BigUint) -> Self {
        if &exact > cap {
            Capped {
                value: cap.clone(),
                saturated: true,
            }
        } else {
            Capped {
                value: exact,
                saturated: false,
            }
        }
    }

    fn saturated(cap: &BigUint) -> Self {
        Capped {
            value: cap.clone(),
            saturated: true,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Exact value when not saturated and representable.
    pub fn exact_u64(&self) -> Option<u64> {
        if self.saturated {
            None
        } else {
            self.value.to_u64()
        }
    }

    fn is_exact_zero(&self) -> bool {
        !self.saturated && self.value.is_zero()
    }

    fn is_exact_one(&self) -> bool {
        !self.saturated && self.value.is_one()
    }

    fn mul(&self, other: &Capped, cap: &BigUint) -> Capped {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Capped::new(BigUint::zero(), cap);
        }
        // both operands are >= 1 here, so a saturated factor saturates the product
        if self.saturated || other.saturated {
            return Capped::saturated(cap);
        }
        Capped::new(&self.value * &other.value, cap)
    }

    fn add_one(&self, cap: &BigUint) -> Capped {
        if self.saturated {
            return Capped::saturated(cap);
        }
        Capped::new(&self.value + 1u32, cap)
    }

    fn pow(&self, exp: &Capped, cap: &BigUint) -> Capped {
        if exp.is_exact_zero() || self.is_exact_one() {
            return Capped::new(BigUint::one(), cap);
        }
        if self.is_exact_zero() {
            return Capped::new(BigUint::zero(), cap);
        }
        // base >= 2 and exponent >= 1
        if self.saturated || exp.saturated {
            return Capped::saturated(cap);
        }
        let mut remaining = exp.value.clone();
        let mut acc = BigUint::one();
        let base = &self.value;
        // exponents beyond the cap's bit length saturate immediately
        if remaining > BigUint::from(cap.bits()) {
            return Capped::saturated(cap);
        }
        while !remaining.is_zero() {
            acc *= base;
            if &acc > cap {
                return Capped::saturated(cap);
            }
            remaining -= 1u32;
        }
        Capped::new(acc, cap)
    }
}

fn capped_pow2(k: u64, cap: &BigUint) -> Capped {
    if k >= cap.bits() {
        return Capped::saturated(cap);
    }
    Capped::new(BigUint::one() << k, cap)
}

/// One row of the `N_i`, `R_i` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdRow {
    pub i: usize,
    pub n: Capped,
    pub r: Capped,
}

/// `N_i` and `R_i` for `i = 0..=levels`, saturating at `cap`.
pub fn threshold_table(levels: usize, q: u64, s: u64, k: u64, cap: &BigUint) -> Vec<ThresholdRow> {
    let q = Capped::new(BigUint::from(q), cap);
    let s = Capped::new(BigUint::from(s), cap);
    let two_k = capped_pow2(k, cap);
    let mut n = two_k.add_one(cap);
    let mut rows = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let r = q.mul(&n.pow(&s, cap), cap);
        rows.push(ThresholdRow {
            i,
            n: n.clone(),
            r: r.clone(),
        });
        n = two_k.mul(&r.add_one(cap).pow(&n, cap), cap);
    }
    rows
}

/// `min(N_i(q,s,k), cap)`.
pub fn threshold_n(i: usize, q: u64, s: u64, k: u64, cap: &BigUint) -> Capped {
    threshold_table(i, q, s, k, cap).pop().expect("non-empty").n
}

/// `min(R_i(q,s,k), cap)`.
pub fn threshold_r(i: usize, q: u64, s: u64, k: u64, cap: &BigUint) -> Capped {
    threshold_table(i, q, s, k, cap).pop().expect("non-empty").r
}

fn checked_pow(base: &BigUint, exp: &BigUint, budget: u64) -> Result<BigUint, KernelError> {
    if exp.is_zero() || base.is_one() {
        return Ok(BigUint::one());
    }
    if base.is_zero() {
        return Ok(BigUint::zero());
    }
    let exp = exp
        .to_u64()
        .filter(|e| e.saturating_mul(base.bits() - 1) <= budget)
        .ok_or(KernelError::BitBudget { budget })?;
    let exp = u32::try_from(exp).map_err(|_| KernelError::BitBudget { budget })?;
    let out = base.pow(exp);
    if out.bits() > budget {
        return Err(KernelError::BitBudget { budget });
    }
    Ok(out)
}

/// Exact `(N_i, R_i)`, failing once a value outgrows `bit_budget` bits.
pub fn exact_thresholds(
    i: usize,
    q: u64,
    s: u64,
    k: u64,
    bit_budget: u64,
) -> Result<(BigUint, BigUint), KernelError> {
    if k >= bit_budget {
        return Err(KernelError::BitBudget { budget: bit_budget });
    }
    let two_k = BigUint::one() << k;
    let mut n = &two_k + 1u32;
    let (q, s) = (BigUint::from(q), BigUint::from(s));
    let mut level = 0;
    loop {
        let r = &q * checked_pow(&n, &s, bit_budget)?;
        if r.bits() > bit_budget {
            return Err(KernelError::BitBudget { budget: bit_budget });
        }
        if level == i {
            return Ok((n, r));
        }
        n = &two_k * checked_pow(&(r + 1u32), &n, bit_budget)?;
        if n.bits() > bit_budget {
            return Err(KernelError::BitBudget { budget: bit_budget });
        }
        level += 1;
    }
}

/// `tow_0(x) = x`, `tow_{i+1}(x) = 2^{tow_i(x)}`.
pub fn tower(i: usize, x: &BigUint, bit_budget: u64) -> Result<BigUint, KernelError> {
    let mut value = x.clone();
    for _ in 0..i {
        let exp = value
            .to_u64()
            .filter(|&e| e < bit_budget)
            .ok_or(KernelError::BitBudget { budget: bit_budget })?;
        value = BigUint::one() << exp;
    }
    Ok(value)
}

/// The argument `(2^{h+5} - 12)(t+q+s)(q+s)` of the kernel size bound.
pub fn kernel_bound_argument(h: u32, t: u64, q: u64, s: u64) -> BigUint {
    let factor = (BigUint::one() << (h + 5)) - 12u32;
    factor * BigUint::from(t + q + s) * BigUint::from(q + s)
}

/// `tow_h((2^{h+5} - 12)(t+q+s)(q+s))`, the vertex bound on kernels reduced with the derived thresholds.
pub fn kernel_size_bound(
    h: u32,
    t: u64,
    q: u64,
    s: u64,
    bit_budget: u64,
) -> Result<BigUint, KernelError> {
    if h == 0 {
        return Err(KernelError::InvalidArgument(
            "height must be at least 1".into(),
        ));
    }
    tower(h as usize, &kernel_bound_argument(h, t, q, s), bit_budget)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdMode {
    /// `R_i(q, s, k)`.
    Paper { q: u64, s: u64, k: u64 },
    /// `R_i(M + q, s, k)`, deleting limbs in groups of `M`.
    PaperCmso {
        modulus: u64,
        q: u64,
        s: u64,
        k: u64,
    },
    /// Fixed values per level index; levels past the end are unbounded.
    Explicit(Vec<u64>),
}

/// A threshold function `f` on level indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdFn {
    mode: ThresholdMode,
    cap: BigUint,
    step: u64,
}

impl ThresholdFn {
    pub fn paper(q: u64, s: u64, k: u64) -> Self {
        ThresholdFn {
            mode: ThresholdMode::Paper { q, s, k },
            cap: BigUint::from(u64::MAX),
            step: 1,
        }
    }

    /// Thresholds for an MSO sentence with `q` element and `s` set quantifiers
    /// over `t` labels (`k = t + 3q + s`).
    pub fn for_mso(t: u64, q: u64, s: u64) -> Self {
        Self::paper(q, s, t + 3 * q + s)
    }

    pub fn paper_cmso(modulus: u64, q: u64, s: u64, k: u64) -> Result<Self, KernelError> {
        if modulus == 0 {
            return Err(KernelError::InvalidArgument(
                "modulus must be at least 1".into(),
            ));
        }
        Ok(ThresholdFn {
            mode: ThresholdMode::PaperCmso { modulus, q, s, k },
            cap: BigUint::from(u64::MAX),
            step: modulus,
        })
    }

    /// Thresholds for a CMSO sentence with moduli lcm `modulus`.
    pub fn for_cmso(modulus: u64, t: u64, q: u64, s: u64) -> Result<Self, KernelError> {
        Self::paper_cmso(modulus, q, s, t + 3 * q + s)
    }

    pub fn explicit(values: Vec<u64>) -> Result<Self, KernelError> {
        if values.contains(&0) {
            return Err(KernelError::InvalidArgument(
                "explicit thresholds must be at least 1".into(),
            ));
        }
        Ok(ThresholdFn {
            mode: ThresholdMode::Explicit(values),
            cap: BigUint::from(u64::MAX),
            step: 1,
        })
    }

    /// Number of limbs deleted at once.
    pub fn with_step(mut self, step: u64) -> Result<Self, KernelError> {
        if step == 0 {
            return Err(KernelError::InvalidArgument(
                "deletion step must be at least 1".into(),
            ));
        }
        self.step = step;
        Ok(self)
    }

    pub fn with_cap(mut self, cap: BigUint) -> Self {
        self.cap = cap;
        self
    }

    pub fn mode(&self) -> &ThresholdMode {
        &self.mode
    }

    pub fn cap(&self) -> &BigUint {
        &self.cap
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Values for level indices `0..=levels`, capped at `min(self.cap, cap)`.
    /// `None` means no finite threshold at or below the cap.
    pub fn values(&self, levels: usize, cap: &BigUint) -> Vec<Option<u64>> {
        let cap = cap.min(&self.cap);
        let from_rows = |rows: Vec<ThresholdRow>| -> Vec<Option<u64>> {
            rows.into_iter().map(|row| row.r.exact_u64()).collect()
        };
        match &self.mode {
            ThresholdMode::Paper { q, s, k } => from_rows(threshold_table(levels, *q, *s, *k, cap)),
            ThresholdMode::PaperCmso { modulus, q, s, k } => {
                from_rows(threshold_table(levels, modulus + q, *s, *k, cap))
            }
            ThresholdMode::Explicit(values) => (0..=levels)
                .map(|i| values.get(i).copied().filter(|&v| BigUint::from(v) <= *cap))
                .collect(),
        }
    }

    /// Threshold at level index `i`.
    pub fn at(&self, i: usize) -> Option<u64> {
        self.values(i, &self.cap.clone()).pop().flatten()
    }
}

/// Statistics of one reduction run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    pub original_size: usize,
    pub kernel_size: usize,
    /// Level of the parent node -> number of limbs deleted below it.
    pub limbs_deleted_per_level: BTreeMap<usize, usize>,
}

/// Reduces `tree` with threshold function `f`, keeping node ids.
pub fn reduce(tree: &LabelledTree, f: &ThresholdFn) -> LabelledTree {
    reduce_with_report(tree, f).0
}

/// Reduction bottom-up over the original levels. Within each class of
/// l-isomorphic limbs the ones with the largest node ids are deleted, `step`
/// at a time, while more than `f(level - 1)` remain.
pub fn reduce_with_report(tree: &LabelledTree, f: &ThresholdFn) -> (LabelledTree, ReductionReport) {
    let mut work = tree.clone();
    let height = tree.height();
    let n = tree.len();
    // class sizes never exceed n, so anything above n + 1 behaves like infinity
    let cap = BigUint::from(n as u64 + 1);
    let thresholds = f.values(height, &cap);
    let step = f.step() as usize;
    let mut report = ReductionReport {
        original_size: n,
        ..Default::default()
    };

    let mut codes: Vec<Option<CanonicalCode>> = vec![None; work.capacity()];
    for &v in tree.bfs_order().iter().rev() {
        let level = height - tree.depth(v);
        if level >= 1 && !work.is_leaf(v) {
            if let Some(theta) = thresholds[level - 1].map(|t| t as usize) {
                let mut classes: BTreeMap<&CanonicalCode, Vec<NodeId>> = BTreeMap::new();
                for &c in work.children(v) {
                    classes
                        .entry(codes[c].as_ref().expect("child encoded"))
                        .or_default()
                        .push(c);
                }
                let mut victims = Vec::new();
                for mut members in classes.into_values() {
                    members.sort_unstable();
                    let mut keep = members.len();
                    while keep > theta && keep >= step {
                        keep -= step;
                    }
                    victims.extend_from_slice(&members[keep..]);
                }
                if !victims.is_empty() {
                    *report.limbs_deleted_per_level.entry(level).or_default() += victims.len();
                    for c in victims {
                        work.remove_subtree(c);
                    }
                }
            }
        }
        codes[v] = Some(work.encode_node(v, &codes));
    }
    report.kernel_size = work.len();
    (work, report)
}

/// CMSO reduction: threshold `R_i(M+q, s, t+3q+s)`, deleting `M` limbs at once.
pub fn reduce_cmso(
    tree: &LabelledTree,
    modulus: u64,
    q: u64,
    s: u64,
    t: u64,
) -> Result<LabelledTree, KernelError> {
    let f = ThresholdFn::for_cmso(modulus, t, q, s)?;
    Ok(reduce(tree, &f))
}
