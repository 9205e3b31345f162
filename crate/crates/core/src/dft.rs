//! Draw-and-loose DFT primitive: a `(p+1)`-ary butterfly network.
//!
//! With `K = (p+1)^H`, processor `k` keeps a single running value
//! `Q(k, t)`. In round `t + 1` it exchanges that value with the `p`
//! processors whose index differs from `k` only in base-`(p+1)` digit `t`,
//! and replaces it with a Vandermonde combination of the group's values.
//! Starting from `Q(k, 0) = x_k`, after `H` rounds processor `k` holds
//! `sum_i x_i * beta^(rev(i) * k)`, i.e. the product with the row-permuted
//! DFT matrix `A_rev[i][j] = beta^(rev(i) * j)`, where `rev` reverses the
//! `H` digits. Each message is one field element, so `C1 = C2 = H`.

use crate::error::{Error, Result};
use crate::gf::{Fe, PrimeField};
use crate::linalg::{digit_reverse, MatrixFq};
use crate::netsim::{self, CostReport, Message, Outgoing, Protocol, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DftParams {
    pub k: usize,
    pub h: usize,
    /// Primitive `K`-th root of unity `g^((q-1)/K)`.
    pub beta: Fe,
    /// `p + 1`.
    pub base: usize,
    field: PrimeField,
}

/// Smallest `h` with `base^h == k`, if any.
fn exact_log(k: usize, base: usize) -> Option<usize> {
    let (mut h, mut acc) = (0, 1usize);
    while acc < k {
        acc = acc.checked_mul(base)?;
        h += 1;
    }
    (acc == k).then_some(h)
}

impl DftParams {
    pub fn new(field: &PrimeField, k: usize, p: usize) -> Result<Self> {
        let base = p + 1;
        let h = exact_log(k, base).ok_or(Error::NotAPower { k, base })?;
        let beta = field.root_of_unity(k)?;
        Ok(Self {
            k,
            h,
            beta,
            base,
            field: field.clone(),
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    fn digit(&self, k: usize, t: usize) -> usize {
        (k / self.base.pow(t as u32)) % self.base
    }

    fn with_digit(&self, k: usize, t: usize, d: usize) -> usize {
        let w = self.base.pow(t as u32);
        k - self.digit(k, t) * w + d * w
    }

    /// Digit-reversal permutation `rev_H` on `[0, K)`.
    pub fn digit_reversal(&self) -> Vec<usize> {
        (0..self.k)
            .map(|i| digit_reverse(i, self.h, self.base).expect("index below K"))
            .collect()
    }

    /// The matrix the forward protocol computes: `A_rev[i][j] = beta^(rev(i) j)`.
    pub fn computed_matrix(&self) -> MatrixFq {
        let rev = self.digit_reversal();
        MatrixFq::from_fn(&self.field, self.k, self.k, |i, j| {
            self.beta.pow((rev[i] * j % self.k) as u64)
        })
    }
}

pub fn dft_params(config: &SystemConfig) -> Result<DftParams> {
    DftParams::new(&config.field, config.k, config.p)
}

/// Tree node `gamma_{d_{h-1} ... d_0} = (beta^(sum d_i (p+1)^i))^((p+1)^(H-h))`.
///
/// `digits` is most significant first; the empty sequence is the root, `1`.
pub fn gamma(digits: &[usize], params: &DftParams) -> Result<Fe> {
    let h = digits.len();
    if h > params.h {
        return Err(Error::DimensionError(format!(
            "{h} digits for a tree of height {}",
            params.h
        )));
    }
    let mut value = 0usize;
    for &d in digits {
        if d >= params.base {
            return Err(Error::BadDigit {
                digit: d,
                base: params.base,
            });
        }
        value = value * params.base + d;
    }
    let exp = value * params.base.pow((params.h - h) as u32);
    Ok(params.beta.pow((exp % params.k) as u64))
}

/// `(p+1) x (p+1)` butterfly of round `t + 1` for the group containing `k`:
/// entry `(rho, e)` is `gamma(rho k_{t-1} ... k_0)^e`.
pub fn butterfly_matrix(k: usize, t: usize, params: &DftParams) -> Result<MatrixFq> {
    if t >= params.h {
        return Err(Error::DimensionError(format!("round digit {t} with H = {}", params.h)));
    }
    let mut digits = vec![0usize; t + 1];
    for i in 0..t {
        // most significant first: digits[1] = k_{t-1}, ..., digits[t] = k_0
        digits[t - i] = params.digit(k, i);
    }
    let nodes: Vec<Fe> = (0..params.base)
        .map(|rho| {
            digits[0] = rho;
            gamma(&digits, params)
        })
        .collect::<Result<_>>()?;
    Ok(MatrixFq::from_fn(&params.field, params.base, params.base, |rho, e| {
        nodes[rho].pow(e as u64)
    }))
}

/// The butterfly network for one transform direction.
#[derive(Debug, Clone)]
pub struct DftProtocol {
    params: DftParams,
    direction: TransformDirection,
    // coefficients[t][prefix] is the (possibly inverted) butterfly for digit
    // t and lower digits `prefix = k mod (p+1)^t`
    coefficients: Vec<Vec<MatrixFq>>,
}

impl DftProtocol {
    pub fn new(params: DftParams, direction: TransformDirection) -> Result<Self> {
        let mut coefficients = Vec::with_capacity(params.h);
        for t in 0..params.h {
            let table = (0..params.base.pow(t as u32))
                .map(|prefix| {
                    let m = butterfly_matrix(prefix, t, &params)?;
                    match direction {
                        TransformDirection::Forward => Ok(m),
                        TransformDirection::Inverse => m.invert(),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            coefficients.push(table);
        }
        Ok(Self {
            params,
            direction,
            coefficients,
        })
    }

    pub fn params(&self) -> &DftParams {
        &self.params
    }

    /// Digit handled in engine round `round` (1-based).
    fn digit_of_round(&self, round: usize) -> usize {
        match self.direction {
            TransformDirection::Forward => round - 1,
            TransformDirection::Inverse => self.params.h - round,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ButterflyState {
    k: usize,
    q: Fe,
}

impl ButterflyState {
    pub fn value(&self) -> Fe {
        self.q
    }
}

impl Protocol for DftProtocol {
    type State = ButterflyState;

    fn init(&self, k: usize, x: Fe) -> ButterflyState {
        ButterflyState { k, q: x }
    }

    fn emit(&self, s: &ButterflyState, round: usize) -> Vec<Outgoing> {
        if round > self.params.h {
            return Vec::new();
        }
        let t = self.digit_of_round(round);
        let own = self.params.digit(s.k, t);
        (0..self.params.base)
            .filter(|&rho| rho != own)
            .map(|rho| Outgoing {
                to: self.params.with_digit(s.k, t, rho),
                port: (rho + self.params.base - own) % self.params.base,
                payload: vec![s.q],
            })
            .collect()
    }

    fn absorb(&self, s: &mut ButterflyState, round: usize, inbound: &[Message]) {
        if round > self.params.h {
            return;
        }
        let t = self.digit_of_round(round);
        let own = self.params.digit(s.k, t);
        let mut group = vec![self.params.field.zero(); self.params.base];
        group[own] = s.q;
        for m in inbound {
            group[self.params.digit(m.sender, t)] = m.payload[0];
        }
        let prefix = s.k % self.params.base.pow(t as u32);
        let coeffs = &self.coefficients[t][prefix];
        s.q = group
            .iter()
            .enumerate()
            .fold(self.params.field.zero(), |acc, (rho, &v)| acc + coeffs.get(own, rho) * v);
    }

    fn is_done(&self, _: &ButterflyState, round: usize) -> bool {
        round >= self.params.h
    }

    fn finish(&self, s: ButterflyState) -> Fe {
        s.q
    }
}

/// Forward: `x · A_rev`. Inverse: `x · A_rev^{-1}`.
pub fn run_dft(
    config: &SystemConfig,
    x: &[Fe],
    direction: TransformDirection,
) -> Result<(Vec<Fe>, CostReport)> {
    let proto = DftProtocol::new(dft_params(config)?, direction)?;
    netsim::run(config, &proto, x)
}
