//! Encoding `K` inputs into `N = B K` outputs on `N` processors.
//!
//! Processors `0..K` hold the inputs. A `(p+1)`-ary broadcast tree copies
//! `x_i` to every `l K + i`, after which each block `{l K, .., l K + K - 1}`
//! runs prepare-and-shoot on its own `K x K` slice of `G`.

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::linalg::MatrixFq;
use crate::netsim::{self, CostReport, Grouped, Message, Outgoing, Protocol, SystemConfig};
use crate::universal::PrepareAndShoot;

/// Tree broadcast within each residue class `{l K + i}`.
#[derive(Debug, Clone)]
pub struct Broadcast {
    k: usize,
    copies: usize,
    base: usize,
    rounds: usize,
}

impl Broadcast {
    pub fn new(k: usize, copies: usize, p: usize) -> Self {
        let base = p + 1;
        let (mut rounds, mut reach) = (0, 1usize);
        while reach < copies {
            reach = reach.saturating_mul(base);
            rounds += 1;
        }
        Self {
            k,
            copies,
            base,
            rounds,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

#[derive(Debug, Clone)]
pub struct BroadcastState {
    copy: usize,
    class: usize,
    value: Option<Fe>,
}

impl Protocol for Broadcast {
    type State = BroadcastState;

    fn init(&self, k: usize, x: Fe) -> BroadcastState {
        let copy = k / self.k;
        BroadcastState {
            copy,
            class: k % self.k,
            value: (copy == 0).then_some(x),
        }
    }

    fn emit(&self, s: &BroadcastState, round: usize) -> Vec<Outgoing> {
        let span = self.base.pow(round as u32 - 1);
        let Some(v) = s.value else { return Vec::new() };
        if round > self.rounds || s.copy >= span {
            return Vec::new();
        }
        (1..self.base)
            .map(|rho| s.copy + rho * span)
            .filter(|&target| target < self.copies)
            .enumerate()
            .map(|(i, target)| Outgoing {
                to: target * self.k + s.class,
                port: i + 1,
                payload: vec![v],
            })
            .collect()
    }

    fn absorb(&self, s: &mut BroadcastState, _round: usize, inbound: &[Message]) {
        if let Some(m) = inbound.first() {
            s.value = Some(m.payload[0]);
        }
    }

    fn is_done(&self, _: &BroadcastState, round: usize) -> bool {
        round >= self.rounds
    }

    fn finish(&self, s: BroadcastState) -> Fe {
        s.value.expect("broadcast tree reaches every copy")
    }
}

/// Computes `x · G` for a `K x N` matrix `G` on `config.k = N` processors.
pub fn run_orchestrated(
    config: &SystemConfig,
    g: &MatrixFq,
    x: &[Fe],
) -> Result<(Vec<Fe>, CostReport)> {
    let (k, n) = (g.rows(), g.cols());
    if k == 0 || n % k != 0 {
        return Err(Error::BadPartition { k, n });
    }
    if config.k != n {
        return Err(Error::DimensionError(format!(
            "{} processors for a matrix with {n} columns",
            config.k
        )));
    }
    if x.len() != k {
        return Err(Error::DimensionError(format!("input has {} entries, expected {k}", x.len())));
    }
    if g.field() != &config.field {
        return Err(Error::FieldMismatch {
            left: g.field().modulus(),
            right: config.field.modulus(),
        });
    }
    if let Some(bad) = x.iter().find(|v| !config.field.contains(**v)) {
        return Err(Error::FieldMismatch {
            left: bad.modulus(),
            right: config.field.modulus(),
        });
    }
    let copies = n / k;
    let mut padded = x.to_vec();
    padded.resize(n, config.field.zero());
    let (spread, first) = netsim::run(config, &Broadcast::new(k, copies, config.p), &padded)?;

    let groups = (0..copies)
        .map(|l| {
            let block = g.columns(l * k, k);
            Ok(((l * k..(l + 1) * k).collect(), PrepareAndShoot::new(&block, config.p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (out, second) = netsim::run(config, &Grouped::new(n, groups)?, &spread)?;
    Ok((out, first.then(second)))
}
