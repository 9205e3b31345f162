//! Prepare-and-shoot: a universal schedule computing any `K x K` matrix in
//! `ceil(log_{p+1} K)` rounds.
//!
//! The prepare phase runs `K` parallel one-to-`m` broadcasts so that
//! processor `k` ends up holding `x_r` for the `m` indices `r` just below it
//! (cyclically). The shoot phase then runs `K` parallel `n`-to-one reductions
//! of partial inner products along strides of `m`. Only the coefficients
//! depend on `A`; who talks to whom and how much is fixed by `(K, p)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::linalg::MatrixFq;
use crate::netsim::{self, CostReport, Message, Outgoing, Protocol, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PSParams {
    pub k: usize,
    pub p: usize,
    /// Largest `L` with `(p+1)^L < K`.
    pub l: usize,
    pub t_p: usize,
    pub t_s: usize,
    /// `(p+1)^t_p`, the length of each prepared window.
    pub m: usize,
    /// `(p+1)^t_s`, the fan-in of each reduction.
    pub n: usize,
}

pub fn ps_params(k: usize, p: usize) -> Result<PSParams> {
    if k < 2 {
        return Err(Error::Degenerate(format!(
            "K = {k}: a single processor computes A[0][0] * x_0 locally"
        )));
    }
    if p == 0 {
        return Err(Error::BadConfig("p must be at least 1".into()));
    }
    let base = p + 1;
    let mut l = 0usize;
    while base.pow(l as u32 + 1) < k {
        l += 1;
    }
    let (t_p, t_s) = if l.is_multiple_of(2) { (l / 2 + 1, l / 2) } else { (l.div_ceil(2), l.div_ceil(2)) };
    let m = base.pow(t_p as u32);
    let n = base.pow(t_s as u32);
    debug_assert!(k <= n * m);
    Ok(PSParams {
        k,
        p,
        l,
        t_p,
        t_s,
        m,
        n,
    })
}

impl PSParams {
    pub fn rounds(&self) -> usize {
        self.t_p + self.t_s
    }

    fn base(&self) -> usize {
        self.p + 1
    }

    /// Message size of each round: `(p+1)^(t-1)` while preparing, then
    /// `(p+1)^(t_s - t)` while shooting.
    pub fn message_sizes(&self) -> Vec<usize> {
        let b = self.base();
        (1..=self.t_p)
            .map(|t| b.pow(t as u32 - 1))
            .chain((1..=self.t_s).map(|t| b.pow((self.t_s - t) as u32)))
            .collect()
    }

    pub fn prepare_c2(&self) -> usize {
        (self.base().pow(self.t_p as u32) - 1) / self.p
    }

    pub fn shoot_c2(&self) -> usize {
        (self.base().pow(self.t_s as u32) - 1) / self.p
    }

    pub fn predicted_c2(&self) -> usize {
        self.prepare_c2() + self.shoot_c2()
    }

    /// Offsets `l` (meaning `x_{k-l}`) a processor holds after `t` prepare rounds.
    fn prepared_offsets(&self, t: usize) -> impl Iterator<Item = usize> {
        let step = self.m / self.base().pow(t as u32);
        (0..self.base().pow(t as u32)).map(move |i| i * step)
    }

    /// Number of indices counted twice by the reductions and corrected
    /// locally afterwards.
    pub fn overlap_len(&self) -> usize {
        if self.n == 1 {
            0
        } else {
            (self.n * self.m).min(self.k + self.m) - self.k
        }
    }

    /// Whether window offset `l` of reduction slot `j` is included in the
    /// initial accumulator. Windows are cut off at distance `K + m` from the
    /// destination so that no index is counted more than twice and every
    /// double-counted index is one the destination already holds.
    fn contributes(&self, j: usize, l: usize) -> bool {
        self.n == 1 || j * self.m + l < self.k + self.m
    }
}

fn sub_mod(a: usize, b: usize, k: usize) -> usize {
    (a + k - b % k) % k
}

/// Residues `r` of `R_k^-`, i.e. `k - l` for `l` in `[0, m)`, deduplicated.
pub fn prepare_window(params: &PSParams, k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..params.m).map(|l| sub_mod(k, l, params.k)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Round `t` of the prepare phase at processor `k`: forward everything held
/// to `k + rho * m / (p+1)^t` on port `rho`. Destinations that coincide
/// modulo `K` (only when `K <= p + 1`) receive one copy; the processor's own
/// index is skipped.
pub fn prepare_round(
    params: &PSParams,
    k: usize,
    t: usize,
    held: &BTreeMap<usize, Fe>,
) -> Vec<Outgoing> {
    let stride = params.m / params.base().pow(t as u32);
    let payload: Vec<Fe> = params
        .prepared_offsets(t - 1)
        .map(|l| held[&sub_mod(k, l, params.k)])
        .collect();
    let mut seen = vec![k];
    let mut out = Vec::with_capacity(params.p);
    for rho in 1..=params.p {
        let to = (k + rho * stride) % params.k;
        if seen.contains(&to) {
            continue;
        }
        seen.push(to);
        out.push(Outgoing {
            to,
            port: rho,
            payload: payload.clone(),
        });
    }
    out
}

fn prepare_absorb(params: &PSParams, t: usize, held: &mut BTreeMap<usize, Fe>, inbound: &[Message]) {
    for msg in inbound {
        for (l, &v) in params.prepared_offsets(t - 1).zip(&msg.payload) {
            held.insert(sub_mod(msg.sender, l, params.k), v);
        }
    }
}

/// Accumulators `w_{k,s}` for `s = k + j*m`, indexed by the slot `j`.
///
/// Slots are kept positional rather than keyed by `s mod K`, since distinct
/// slots can name the same destination when `(n-1) m >= K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShootStore {
    origin: usize,
    m: usize,
    k: usize,
    acc: Vec<Fe>,
}

impl ShootStore {
    /// Destination processor of slot `j`.
    pub fn destination(&self, j: usize) -> usize {
        (self.origin + j * self.m) % self.k
    }

    pub fn destinations(&self) -> Vec<usize> {
        (0..self.acc.len()).map(|j| self.destination(j)).collect()
    }

    pub fn slot(&self, j: usize) -> Fe {
        self.acc[j]
    }

    /// `(destination, accumulator)` pairs in slot order.
    pub fn entries(&self) -> Vec<(usize, Fe)> {
        self.acc.iter().enumerate().map(|(j, &w)| (self.destination(j), w)).collect()
    }
}

/// Initial accumulators: `w_{k,k+jm} = sum_r x_r A[r][k+jm]` over the
/// prepared window of `k`.
pub fn shoot_init(
    params: &PSParams,
    k: usize,
    a: &MatrixFq,
    held: &BTreeMap<usize, Fe>,
) -> Result<ShootStore> {
    let zero = a.field().zero();
    if let Some(&missing) = prepare_window(params, k).iter().find(|r| !held.contains_key(r)) {
        return Err(Error::IncompletePrepare {
            processor: k,
            missing,
        });
    }
    let acc = (0..params.n)
        .map(|j| {
            let s = (k + j * params.m) % params.k;
            if params.n == 1 {
                // the window is a set; with m >= K it wraps onto itself
                held.iter().fold(zero, |acc, (&r, &x)| acc + x * a.get(r, s))
            } else {
                (0..params.m)
                    .filter(|&l| params.contributes(j, l))
                    .fold(zero, |acc, l| {
                        let r = sub_mod(k, l, params.k);
                        acc + held[&r] * a.get(r, s)
                    })
            }
        })
        .collect();
    Ok(ShootStore {
        origin: k,
        m: params.m,
        k: params.k,
        acc,
    })
}

fn shoot_stride(params: &PSParams, t: usize) -> usize {
    params.m * params.base().pow(t as u32 - 1)
}

/// Slots sent on port `rho` in shoot round `t`: those whose base-`(p+1)`
/// digit `t-1` equals `rho` and whose lower digits are zero.
fn shoot_slots(params: &PSParams, t: usize, rho: usize) -> impl Iterator<Item = usize> {
    let b = params.base();
    let lo = rho * b.pow(t as u32 - 1);
    let step = b.pow(t as u32);
    (0..b.pow((params.t_s - t) as u32)).map(move |i| lo + i * step)
}

/// Round `t` of the shoot phase: send the slots destined for the subtree of
/// `k + rho * m * (p+1)^(t-1)` through port `rho`. A partner that wraps onto
/// `k` itself is served locally in [`shoot_absorb`].
pub fn shoot_round(params: &PSParams, t: usize, store: &ShootStore) -> Vec<Outgoing> {
    let stride = shoot_stride(params, t);
    (1..=params.p)
        .filter_map(|rho| {
            let to = (store.origin + rho * stride) % params.k;
            (to != store.origin).then(|| Outgoing {
                to,
                port: rho,
                payload: shoot_slots(params, t, rho).map(|j| store.acc[j]).collect(),
            })
        })
        .collect()
}

pub fn shoot_absorb(params: &PSParams, t: usize, store: &mut ShootStore, inbound: &[Message]) {
    let step = params.base().pow(t as u32);
    let stride = shoot_stride(params, t);
    for rho in 1..=params.p {
        if (rho * stride).is_multiple_of(params.k) {
            let local: Vec<Fe> = shoot_slots(params, t, rho).map(|j| store.acc[j]).collect();
            for (i, v) in local.into_iter().enumerate() {
                store.acc[i * step] = store.acc[i * step] + v;
            }
        }
    }
    for msg in inbound {
        for (i, &v) in msg.payload.iter().enumerate() {
            store.acc[i * step] = store.acc[i * step] + v;
        }
    }
}

/// Indices counted twice in `y_k`: `k, k-1, ...` for [`PSParams::overlap_len`] steps.
pub fn overlap_set(params: &PSParams, k: usize) -> Vec<usize> {
    (0..params.overlap_len()).map(|j| sub_mod(k, j, params.k)).collect()
}

/// `x̂_k = y_k - sum_{r in O_k} A[r][k] x_r`, using only local packets.
pub fn overlap_correct(
    params: &PSParams,
    k: usize,
    y: Fe,
    held: &BTreeMap<usize, Fe>,
    a: &MatrixFq,
) -> Result<Fe> {
    overlap_set(params, k).into_iter().try_fold(y, |acc, r| {
        let x = held.get(&r).ok_or(Error::IncompletePrepare {
            processor: k,
            missing: r,
        })?;
        Ok(acc - a.get(r, k) * *x)
    })
}

/// The prepare-and-shoot protocol for a fixed matrix.
#[derive(Debug, Clone)]
pub struct PrepareAndShoot {
    params: Option<PSParams>,
    a: MatrixFq,
}

impl PrepareAndShoot {
    pub fn new(a: &MatrixFq, p: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionError(format!(
                "prepare-and-shoot needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let params = if a.rows() == 1 { None } else { Some(ps_params(a.rows(), p)?) };
        Ok(Self {
            params,
            a: a.clone(),
        })
    }

    pub fn params(&self) -> Option<&PSParams> {
        self.params.as_ref()
    }
}

#[derive(Debug, Clone)]
pub struct PsState {
    k: usize,
    held: BTreeMap<usize, Fe>,
    store: Option<ShootStore>,
    out: Option<Fe>,
}

impl PrepareAndShoot {
    fn conclude(&self, params: &PSParams, state: &mut PsState) {
        let store = state.store.as_ref().expect("shoot store initialized");
        let y = store.slot(0);
        state.out = Some(
            overlap_correct(params, state.k, y, &state.held, &self.a)
                .expect("prepare phase covers the overlap set"),
        );
    }
}

impl Protocol for PrepareAndShoot {
    type State = PsState;

    fn init(&self, k: usize, x: Fe) -> PsState {
        let mut held = BTreeMap::new();
        held.insert(k, x);
        let out = self.params.is_none().then(|| self.a.get(0, 0) * x);
        PsState {
            k,
            held,
            store: None,
            out,
        }
    }

    fn emit(&self, state: &PsState, round: usize) -> Vec<Outgoing> {
        let Some(params) = &self.params else {
            return Vec::new();
        };
        if round <= params.t_p {
            prepare_round(params, state.k, round, &state.held)
        } else if round <= params.rounds() {
            let store = state.store.as_ref().expect("shoot store initialized");
            shoot_round(params, round - params.t_p, store)
        } else {
            Vec::new()
        }
    }

    fn absorb(&self, state: &mut PsState, round: usize, inbound: &[Message]) {
        let Some(params) = &self.params else {
            return;
        };
        if round <= params.t_p {
            prepare_absorb(params, round, &mut state.held, inbound);
            if round == params.t_p {
                state.store = Some(
                    shoot_init(params, state.k, &self.a, &state.held)
                        .expect("prepare phase delivers the full window"),
                );
                if params.t_s == 0 {
                    self.conclude(params, state);
                }
            }
        } else if round <= params.rounds() {
            let t = round - params.t_p;
            let store = state.store.as_mut().expect("shoot store initialized");
            shoot_absorb(params, t, store, inbound);
            if t == params.t_s {
                self.conclude(params, state);
            }
        }
    }

    fn is_done(&self, _: &PsState, round: usize) -> bool {
        self.params.is_none_or(|p| round >= p.rounds())
    }

    fn finish(&self, state: PsState) -> Fe {
        state.out.expect("protocol ran to completion")
    }
}

/// Computes `x · A` on `config.k` processors with prepare-and-shoot.
pub fn run_universal(config: &SystemConfig, a: &MatrixFq, x: &[Fe]) -> Result<(Vec<Fe>, CostReport)> {
    if a.rows() != config.k || a.cols() != config.k {
        return Err(Error::DimensionError(format!(
            "{}x{} matrix on {} processors",
            a.rows(),
            a.cols(),
            config.k
        )));
    }
    if a.field() != &config.field {
        return Err(Error::FieldMismatch {
            left: config.field.modulus(),
            right: a.field().modulus(),
        });
    }
    let proto = PrepareAndShoot::new(a, config.p)?;
    netsim::run(config, &proto, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use crate::linalg::{mat_vec_mul, random_matrix, random_vector};

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn triple(p: &PSParams) -> (usize, usize, usize, usize, usize) {
        (p.l, p.t_p, p.t_s, p.m, p.n)
    }

    #[test]
    fn params_examples() {
        assert_eq!(triple(&ps_params(9, 2).unwrap()), (1, 1, 1, 3, 3));
        assert_eq!(triple(&ps_params(5, 1).unwrap()), (2, 2, 1, 4, 2));
        assert_eq!(triple(&ps_params(2, 1).unwrap()), (0, 1, 0, 2, 1));
        assert!(matches!(ps_params(1, 1), Err(Error::Degenerate(_))));
        // (n-1) m >= K is accepted
        let p = ps_params(65, 2).unwrap();
        assert_eq!((p.m, p.n), (9, 9));
        assert!((p.n - 1) * p.m > 65);
    }

    #[test]
    fn params_invariants() {
        for p in 1..6 {
            for k in 2..300 {
                let ps = ps_params(k, p).unwrap();
                let b = p + 1;
                assert!(b.pow(ps.l as u32) < k && k <= b.pow(ps.l as u32 + 1));
                assert!(k <= ps.n * ps.m);
                assert_eq!(ps.rounds(), ps.l + 1);
                assert_eq!(ps.message_sizes().iter().sum::<usize>(), ps.predicted_c2());
            }
        }
    }

    #[test]
    fn prepare_first_round_k9() {
        let f13 = f(13);
        let ps = ps_params(9, 2).unwrap();
        let mut held = BTreeMap::new();
        held.insert(0, f13.elem(4));
        let out = prepare_round(&ps, 0, 1, &held);
        assert_eq!(out.iter().map(|o| (o.to, o.port)).collect::<Vec<_>>(), [(1, 1), (2, 2)]);
        assert!(out.iter().all(|o| o.payload == vec![f13.elem(4)]));
        assert_eq!(ps.prepare_c2(), 1);
        assert_eq!(ps.shoot_c2(), 1);
    }

    /// Hand-simulates the two prepare rounds of K=5, p=1 (m=4).
    #[test]
    fn prepare_reaches_window_k5() {
        let ps = ps_params(5, 1).unwrap();
        // round 1: stride 2, round 2: stride 1 -> x_0 reaches {0, 2} then {0,1,2,3}
        let mut reached = vec![0usize];
        for t in 1..=ps.t_p {
            let stride = ps.m / 2usize.pow(t as u32);
            let next: Vec<usize> = reached.iter().map(|r| (r + stride) % 5).collect();
            reached.extend(next);
        }
        reached.sort_unstable();
        assert_eq!(reached, [0, 1, 2, 3]);
        assert_eq!(prepare_window(&ps, 0), [0, 2, 3, 4]);
    }

    #[test]
    fn shoot_init_examples() {
        let f13 = f(13);
        let ps = ps_params(9, 2).unwrap();
        let a = random_matrix(&f13, 9, 9, 5);
        let x = random_vector(&f13, 9, 6);
        let held: BTreeMap<usize, Fe> = [7usize, 8, 0].iter().map(|&r| (r, x[r])).collect();
        let store = shoot_init(&ps, 0, &a, &held).unwrap();
        assert_eq!(store.destinations(), [0, 3, 6]);
        let expected = [7usize, 8, 0].iter().fold(f13.zero(), |acc, &r| acc + x[r] * a.get(r, 3));
        assert_eq!(store.slot(1), expected);

        let zero = MatrixFq::zeros(&f13, 9, 9);
        let s0 = shoot_init(&ps, 4, &zero, &(2..5).map(|r| (r, x[r])).collect()).unwrap();
        assert!(s0.entries().iter().all(|(_, w)| w.is_zero()));

        let partial: BTreeMap<usize, Fe> = [(0, x[0]), (8, x[8])].into_iter().collect();
        assert_eq!(
            shoot_init(&ps, 0, &a, &partial),
            Err(Error::IncompletePrepare { processor: 0, missing: 7 })
        );
    }

    #[test]
    fn identity_store_has_single_nonzero() {
        // K = nm = 4, p = 1: window of k is {k, k-1}; column k+2 of I touches none of it
        let f13 = f(13);
        let ps = ps_params(4, 1).unwrap();
        let held: BTreeMap<usize, Fe> = [(1, f13.elem(3)), (2, f13.elem(5))].into_iter().collect();
        let store = shoot_init(&ps, 2, &MatrixFq::identity(&f13, 4), &held).unwrap();
        assert_eq!(store.entries(), vec![(2, f13.elem(5)), (0, f13.zero())]);
    }

    #[test]
    fn overlap_examples() {
        assert!(overlap_set(&ps_params(9, 2).unwrap(), 3).is_empty());
        assert_eq!(overlap_set(&ps_params(5, 1).unwrap(), 0), [0, 4, 3]);
        // (n-1) m >= K: overlap is cut at m so it stays inside the window
        let ps = ps_params(9, 1).unwrap();
        assert_eq!(ps.overlap_len(), ps.m);
        for k in 0..9 {
            let win = prepare_window(&ps, k);
            assert!(overlap_set(&ps, k).iter().all(|r| win.contains(r)));
        }
    }

    #[test]
    fn shoot_single_round_k5() {
        let f13 = f(13);
        let cfg = SystemConfig::new(5, 1, &f13).unwrap().with_trace(true);
        let a = random_matrix(&f13, 5, 5, 1);
        let x = random_vector(&f13, 5, 2);
        let (out, rep) = run_universal(&cfg, &a, &x).unwrap();
        assert_eq!(out, mat_vec_mul(&x, &a).unwrap());
        assert_eq!((rep.c1, rep.c2), (3, 4));
        assert_eq!(rep.d, [1, 2, 1]);
        let trace = netsim::dump_trace(&rep).unwrap();
        // in the shoot round processor 0 hears from 1 = 0 - 4 mod 5
        let into_zero: Vec<_> = trace.iter().filter(|e| e.round == 3 && e.to == 0).collect();
        assert_eq!(into_zero.len(), 1);
        assert_eq!(into_zero[0].from, 1);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let f13 = f(13);
        let cfg = SystemConfig::new(5, 1, &f13).unwrap();
        let (out, _) = run_universal(&cfg, &MatrixFq::zeros(&f13, 5, 5), &random_vector(&f13, 5, 3)).unwrap();
        assert!(out.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn single_processor_is_local() {
        let f13 = f(13);
        let cfg = SystemConfig::new(1, 0, &f13).unwrap();
        let a = MatrixFq::from_rows(&f13, &[vec![5]]).unwrap();
        let (out, rep) = run_universal(&cfg, &a, &[f13.elem(3)]).unwrap();
        assert_eq!(out, [f13.elem(2)]);
        assert_eq!((rep.c1, rep.c2), (0, 0));
    }

    #[test]
    fn wraparound_strides() {
        // K = 6, p = 2: the shoot partner 2m = 6 wraps onto the sender itself
        // K = 3, p = 4 can't be configured (p < K) but the inner group case
        // K = 2, p = 3 dedups prepare destinations
        let f17 = f(17);
        for (k, p) in [(6, 2), (9, 1), (65, 2), (27, 2), (10, 3)] {
            let cfg = SystemConfig::new(k, p, &f17).unwrap();
            let a = random_matrix(&f17, k, k, k as u64);
            let x = random_vector(&f17, k, 7);
            let (out, rep) = run_universal(&cfg, &a, &x).unwrap();
            assert_eq!(out, mat_vec_mul(&x, &a).unwrap(), "K={k} p={p}");
            let ps = ps_params(k, p).unwrap();
            assert_eq!(rep.d, ps.message_sizes());
        }
        let ps = PrepareAndShoot::new(&random_matrix(&f17, 2, 2, 1), 3).unwrap();
        let held: BTreeMap<usize, Fe> = [(0, f17.one())].into_iter().collect();
        let out = prepare_round(ps.params().unwrap(), 0, 1, &held);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].to, out[0].port), (1, 1));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let f13 = f(13);
        let cfg = SystemConfig::new(4, 1, &f13).unwrap();
        let a = random_matrix(&f13, 3, 3, 1);
        assert!(matches!(
            run_universal(&cfg, &a, &random_vector(&f13, 4, 1)),
            Err(Error::DimensionError(_))
        ));
    }
}
