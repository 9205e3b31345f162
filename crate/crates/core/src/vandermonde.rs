//! Vandermonde encode on structured evaluation grids, plus its inverse and
//! the Lagrange composition.
//!
//! Let `Z = (p+1)^H` be the largest power of `p+1` dividing `gcd(K, q-1)`
//! and `M = K / Z`. Processor `Z i + c` owns the point `alpha_i * beta_c`
//! with `alpha_i = g^phi(i)` and `beta_c = g^(c (q-1)/Z)`.
//!
//! The draw phase runs prepare-and-shoot inside each column group
//! `{c, c+Z, ..}` on the `M x M` matrix `B[w][i] = alpha_i^(Zw)` and scales
//! by `alpha_i^rev(c)`. The loose phase runs the butterfly DFT inside each
//! row group `{Zi, .., Zi+Z-1}`. The product is the Vandermonde matrix on
//! the grid with rows relabelled by `e(Zw + c) = rev(c) + Zw`.

use crate::dft::{DftParams, DftProtocol, TransformDirection};
use crate::error::{Error, Result};
use crate::gf::{Fe, PrimeField};
use crate::linalg::{digit_reverse, lagrange_matrix, vandermonde, MatrixFq};
use crate::netsim::{self, CostReport, Grouped, SystemConfig};
use crate::universal::{ps_params, PrepareAndShoot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdmParams {
    pub k: usize,
    pub p: usize,
    pub h: usize,
    pub z: usize,
    pub m: usize,
    pub phi: Vec<usize>,
    pub alphas: Vec<Fe>,
    pub betas: Vec<Fe>,
    /// Row relabelling of the computed matrix; an involution on `[0, K)`.
    pub e: Vec<usize>,
    field: PrimeField,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl VdmParams {
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Evaluation points in processor order: index `Z i + c` holds `alpha_i beta_c`.
    pub fn points(&self) -> Vec<Fe> {
        (0..self.k)
            .map(|k| self.alphas[k / self.z] * self.betas[k % self.z])
            .collect()
    }

    fn rev(&self, c: usize) -> usize {
        digit_reverse(c, self.h, self.p + 1).expect("column below Z")
    }

    /// Per-column-group draw matrix `B[w][i] = alpha_i^(Z w)`.
    pub fn draw_matrix(&self) -> MatrixFq {
        MatrixFq::from_fn(&self.field, self.m, self.m, |w, i| {
            self.alphas[i].pow((self.z * w) as u64)
        })
    }

    fn column_groups(&self) -> Vec<Vec<usize>> {
        (0..self.z)
            .map(|c| (0..self.m).map(|w| c + self.z * w).collect())
            .collect()
    }

    fn row_groups(&self) -> Vec<Vec<usize>> {
        (0..self.m)
            .map(|i| (0..self.z).map(|c| self.z * i + c).collect())
            .collect()
    }

    /// Local draw-phase scale on processor `Z i + c`: `alpha_i^rev(c)`.
    fn scale(&self, k: usize) -> Fe {
        self.alphas[k / self.z].pow(self.rev(k % self.z) as u64)
    }

    /// `Psi(M)`: prepare-and-shoot `C2` on `M` processors.
    pub fn psi(&self) -> usize {
        psi(self.m, self.p)
    }

    pub fn predicted_c1(&self) -> usize {
        ceil_log(self.m, self.p + 1) + self.h
    }

    pub fn predicted_c2(&self) -> usize {
        self.h + self.psi()
    }
}

fn ceil_log(k: usize, base: usize) -> usize {
    let (mut t, mut acc) = (0, 1usize);
    while acc < k {
        acc = acc.saturating_mul(base);
        t += 1;
    }
    t
}

/// Prepare-and-shoot `C2` on `m` processors; zero for a single processor.
pub fn psi(m: usize, p: usize) -> usize {
    if m <= 1 {
        0
    } else {
        ps_params(m, p).map(|pr| pr.predicted_c2()).unwrap_or(0)
    }
}

/// Grid parameters for `config`; `phi = None` selects the identity.
pub fn vdm_params(config: &SystemConfig, phi: Option<&[usize]>) -> Result<VdmParams> {
    let field = &config.field;
    let (k, p) = (config.k, config.p);
    let order = field.order();
    if k > order {
        return Err(Error::TooManyProcessors { k, max: order });
    }
    let base = p + 1;
    let g = gcd(k, order);
    let (mut h, mut z) = (0usize, 1usize);
    while g.is_multiple_of(z * base) {
        z *= base;
        h += 1;
    }
    let m = k / z;
    let range = order / z;
    let phi: Vec<usize> = match phi {
        Some(v) => v.to_vec(),
        None => (0..m).collect(),
    };
    if phi.len() != m {
        return Err(Error::BadPhi(format!("expected {m} images, got {}", phi.len())));
    }
    if let Some(&bad) = phi.iter().find(|&&v| v >= range) {
        return Err(Error::BadPhi(format!("image {bad} outside [0, {range})")));
    }
    let mut sorted = phi.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::BadPhi("images are not distinct".into()));
    }
    let alphas = phi.iter().map(|&v| field.gen_pow(v as u64)).collect();
    let betas = (0..z).map(|c| field.gen_pow((c * range) as u64)).collect();
    let e = (0..k)
        .map(|idx| digit_reverse(idx % z, h, base).expect("column below Z") + z * (idx / z))
        .collect();
    Ok(VdmParams {
        k,
        p,
        h,
        z,
        m,
        phi,
        alphas,
        betas,
        e,
        field: field.clone(),
    })
}

/// `A[k'][k] = point_k^e(k')`: the Vandermonde matrix on the grid with rows
/// permuted by `e`.
pub fn target_matrix(params: &VdmParams) -> MatrixFq {
    let pts = params.points();
    MatrixFq::from_fn(&params.field, params.k, params.k, |r, c| {
        pts[c].pow(params.e[r] as u64)
    })
}

fn check_input(config: &SystemConfig, params: &VdmParams, x: &[Fe]) -> Result<()> {
    if config.k != params.k || config.p != params.p || config.field != params.field {
        return Err(Error::BadConfig("grid parameters were built for another system".into()));
    }
    if x.len() != params.k {
        return Err(Error::DimensionError(format!(
            "input has {} entries for {} processors",
            x.len(),
            params.k
        )));
    }
    if let Some(bad) = x.iter().find(|v| !params.field.contains(**v)) {
        return Err(Error::FieldMismatch {
            left: bad.modulus(),
            right: params.field.modulus(),
        });
    }
    Ok(())
}

fn draw(
    config: &SystemConfig,
    params: &VdmParams,
    x: &[Fe],
    direction: TransformDirection,
) -> Result<(Vec<Fe>, CostReport)> {
    check_input(config, params, x)?;
    let b = params.draw_matrix();
    let (b, input): (MatrixFq, Vec<Fe>) = match direction {
        TransformDirection::Forward => (b, x.to_vec()),
        TransformDirection::Inverse => {
            let unscaled = x
                .iter()
                .enumerate()
                .map(|(k, &v)| Ok(v * params.scale(k).inv()?))
                .collect::<Result<_>>()?;
            (b.invert()?, unscaled)
        }
    };
    let proto = PrepareAndShoot::new(&b, params.p)?;
    let groups = params
        .column_groups()
        .into_iter()
        .map(|g| (g, proto.clone()))
        .collect();
    let (mut out, report) = netsim::run(config, &Grouped::new(params.k, groups)?, &input)?;
    if direction == TransformDirection::Forward {
        for (k, v) in out.iter_mut().enumerate() {
            *v = *v * params.scale(k);
        }
    }
    Ok((out, report))
}

fn loose(
    config: &SystemConfig,
    params: &VdmParams,
    f: &[Fe],
    direction: TransformDirection,
) -> Result<(Vec<Fe>, CostReport)> {
    check_input(config, params, f)?;
    if params.h == 0 {
        return Ok((f.to_vec(), CostReport::empty(config.record_trace)));
    }
    let proto = DftProtocol::new(DftParams::new(&params.field, params.z, params.p)?, direction)?;
    let groups = params
        .row_groups()
        .into_iter()
        .map(|g| (g, proto.clone()))
        .collect();
    netsim::run(config, &Grouped::new(params.k, groups)?, f)
}

/// Forward draw phase: processor `Z i + c` ends with `alpha_i^rev(c) f_c(alpha_i)`.
pub fn run_draw_phase(
    config: &SystemConfig,
    params: &VdmParams,
    x: &[Fe],
) -> Result<(Vec<Fe>, CostReport)> {
    draw(config, params, x, TransformDirection::Forward)
}

/// Forward loose phase: a `Z`-point butterfly DFT in every row group.
pub fn run_loose_phase(
    config: &SystemConfig,
    params: &VdmParams,
    f: &[Fe],
) -> Result<(Vec<Fe>, CostReport)> {
    loose(config, params, f, TransformDirection::Forward)
}

/// Forward computes `x · target_matrix`; inverse computes `x · target_matrix^-1`.
pub fn run_vandermonde(
    config: &SystemConfig,
    params: &VdmParams,
    x: &[Fe],
    direction: TransformDirection,
) -> Result<(Vec<Fe>, CostReport)> {
    match direction {
        TransformDirection::Forward => {
            let (f, first) = draw(config, params, x, direction)?;
            let (out, second) = loose(config, params, &f, direction)?;
            Ok((out, first.then(second)))
        }
        TransformDirection::Inverse => {
            let (f, first) = loose(config, params, x, direction)?;
            let (out, second) = draw(config, params, &f, direction)?;
            Ok((out, first.then(second)))
        }
    }
}

/// Inverse encode on the `omega` grid followed by forward encode on the
/// `alpha` grid. The row relabelling cancels, leaving the Lagrange matrix
/// that maps values at the omega points to values at the alpha points.
pub fn run_lagrange(
    config: &SystemConfig,
    phi_omega: &[usize],
    phi_alpha: &[usize],
    x: &[Fe],
) -> Result<(Vec<Fe>, CostReport)> {
    let omega = vdm_params(config, Some(phi_omega))?;
    let alpha = vdm_params(config, Some(phi_alpha))?;
    let (mid, first) = run_vandermonde(config, &omega, x, TransformDirection::Inverse)?;
    let (out, second) = run_vandermonde(config, &alpha, &mid, TransformDirection::Forward)?;
    Ok((out, first.then(second)))
}

/// Oracle for [`run_lagrange`] built from the two grids' points.
pub fn lagrange_target(config: &SystemConfig, phi_omega: &[usize], phi_alpha: &[usize]) -> Result<MatrixFq> {
    let omega = vdm_params(config, Some(phi_omega))?;
    let alpha = vdm_params(config, Some(phi_alpha))?;
    lagrange_matrix(&config.field, &omega.points(), &alpha.points())
}

/// The plain Vandermonde matrix on the grid, without row relabelling.
pub fn grid_vandermonde(params: &VdmParams) -> Result<MatrixFq> {
    vandermonde(&params.field, &params.points())
}
