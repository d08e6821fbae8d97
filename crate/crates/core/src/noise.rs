//! Coin noise channels: squeezed generalized amplitude damping (SGAD), its
//! thermal (GAD) and zero-temperature limits, and the two Pauli flips.
//!
//! Basis convention: `|0⟩` is the excited level. Damping moves population
//! from `|0⟩` to `|1⟩`; at finite temperature the channel relaxes the coin to
//! `ρ₀₀ : ρ₁₁ = N : N + 1`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CoinMap, ComplexMatrix, DensityMatrix, COIN_DIM};

/// Tolerance on `Σ E†E = I`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

/// Negative radicands down to this magnitude are rounding noise and are
/// clamped to zero; anything more negative is a domain error.
const RADICAND_FLOOR: f64 = -1e-12;

/// Slack allowed when checking that probabilities land in `[0, 1]`.
const UNIT_INTERVAL_SLACK: f64 = 1e-9;

/// A Kraus family acting on the coin.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinChannel {
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl CoinChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::parameter("kraus", "a channel needs at least one Kraus operator"));
        }
        if let Some(bad) = kraus.iter().find(|e| e.shape() != (COIN_DIM, COIN_DIM)) {
            return Err(Error::DimensionMismatch(format!(
                "coin Kraus operators must be 2x2, got {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        let channel = Self {
            kraus,
            label: label.into(),
        };
        let deviation = channel.completeness_error();
        if deviation > COMPLETENESS_TOLERANCE {
            return Err(Error::Incomplete { deviation });
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(COIN_DIM)],
            label: "identity".into(),
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `max |Σ E_k†E_k − I|` entrywise.
    pub fn completeness_error(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(COIN_DIM, COIN_DIM);
        for e in &self.kraus {
            let term = e.adjoint().matmul(e).expect("2x2 operators");
            sum = sum.add(&term).expect("2x2 operators");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(COIN_DIM))
    }

    /// `Σ E ρ E†` on a bare 2×2 coin matrix.
    pub fn apply_to_coin(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (COIN_DIM, COIN_DIM) {
            return Err(Error::DimensionMismatch(format!(
                "expected a 2x2 coin state, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(self.coin_map().apply(rho))
    }

    pub(crate) fn coin_map(&self) -> CoinMap {
        CoinMap::from_kraus(&self.kraus)
    }
}

/// `ρ → Σ_k (E_k ⊗ I) ρ (E_k ⊗ I)†` on a coin ⊗ position state.
pub fn apply_coin_channel(rho: &DensityMatrix, channel: &CoinChannel) -> Result<DensityMatrix> {
    match rho.factors() {
        Some((COIN_DIM, _)) => {}
        other => {
            return Err(Error::DimensionMismatch(format!(
                "coin channel needs a 2 x P factorization, state has {other:?}"
            )))
        }
    }
    let out = channel.coin_map().apply(rho.matrix());
    Ok(DensityMatrix::from_evolved(out, rho.factors()))
}

/// Squeezed-thermal-bath parameters, in units where `ħ = k_B = ω₀ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgadParams {
    pub temperature: f64,
    /// Spontaneous emission rate γ₀.
    pub gamma0: f64,
    /// System-bath interaction time per walk step, Δ.
    pub interaction_time: f64,
    /// Bath squeezing magnitude r.
    pub squeezing: f64,
    /// Bath squeezing phase Φ in radians.
    #[serde(default)]
    pub squeezing_phase: f64,
}

impl SgadParams {
    /// Bath settings shared by most of the line and cycle experiments:
    /// `T = 2`, `γ₀ = 0.025`, `Δ = 0.1`, no squeezing.
    pub fn standard_bath() -> Self {
        Self {
            temperature: 2.0,
            gamma0: 0.025,
            interaction_time: 0.1,
            squeezing: 0.0,
            squeezing_phase: 0.0,
        }
    }

    pub fn with_squeezing(self, squeezing: f64) -> Self {
        Self { squeezing, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonnegative("channel.temperature", self.temperature)?;
        check_nonnegative("channel.gamma0", self.gamma0)?;
        check_nonnegative("channel.interaction_time", self.interaction_time)?;
        check_nonnegative("channel.squeezing", self.squeezing)?;
        if !self.squeezing_phase.is_finite() {
            return Err(Error::parameter("channel.squeezing_phase", "must be finite"));
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<SgadDerived> {
        self.validate()?;
        SgadDerived::compute(self)
    }
}

fn check_nonnegative(field: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::parameter(field, format!("must be finite and >= 0, got {value}")));
    }
    Ok(())
}

/// Mean thermal photon number `1 / (e^{1/T} − 1)`, zero at `T = 0`.
pub fn thermal_photons(temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (1.0 / temperature).exp_m1()
    }
}

/// Which root of the quadratic for `p₂` was taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P2Branch {
    Plus,
    Minus,
    /// `γ₀Δ = 0` or `N = 0`, where the general formula is 0/0 and the
    /// closed-form limit is used instead.
    Limit,
}

/// All intermediate quantities of the SGAD Kraus construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SgadDerived {
    pub thermal_photons: f64,
    /// Effective photon number N.
    pub photons: f64,
    /// Squeezing coefficient M.
    pub squeezing_coefficient: Complex64,
    /// `a = sinh(2r)(2N_th + 1) = 2|M|`.
    pub a: f64,
    pub coef_a: f64,
    pub coef_b: f64,
    pub coef_c: f64,
    pub coef_d: f64,
    pub p1: f64,
    pub p2: f64,
    pub nu: f64,
    pub mu: f64,
    pub alpha: f64,
    pub branch: P2Branch,
}

impl fmt::Display for SgadDerived {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N_th={:e} N={:e} M={:e}{:+e}i a={:e} A={:e} B={:e} C={:e} D={:e} p1={:e} p2={:e} nu={:e} mu={:e} alpha={:e}",
            self.thermal_photons,
            self.photons,
            self.squeezing_coefficient.re,
            self.squeezing_coefficient.im,
            self.a,
            self.coef_a,
            self.coef_b,
            self.coef_c,
            self.coef_d,
            self.p1,
            self.p2,
            self.nu,
            self.mu,
            self.alpha
        )
    }
}

fn sqrt_clamped(x: f64, what: &str, derived: &SgadDerived) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= RADICAND_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::ChannelDomain {
            details: format!("negative radicand {what} = {x:e}; {derived}"),
        })
    }
}

fn in_unit_interval(x: f64) -> bool {
    x.is_finite() && (-UNIT_INTERVAL_SLACK..=1.0 + UNIT_INTERVAL_SLACK).contains(&x)
}

impl SgadDerived {
    fn compute(p: &SgadParams) -> Result<Self> {
        let r = p.squeezing;
        let nth = thermal_photons(p.temperature);
        let n = nth * (r.cosh().powi(2) + r.sinh().powi(2)) + r.sinh().powi(2);
        let squeezing_coefficient =
            Complex64::from_polar(-0.5 * (2.0 * r).sinh() * (2.0 * nth + 1.0), p.squeezing_phase);
        let a = (2.0 * r).sinh() * (2.0 * nth + 1.0);
        let g = p.gamma0 * p.interaction_time;

        let mut d = SgadDerived {
            thermal_photons: nth,
            photons: n,
            squeezing_coefficient,
            a,
            coef_a: 0.0,
            coef_b: 0.0,
            coef_c: 0.0,
            coef_d: 0.0,
            p1: 1.0,
            p2: 0.0,
            nu: 0.0,
            mu: 0.0,
            alpha: 0.0,
            branch: P2Branch::Limit,
        };

        if g == 0.0 {
            // no interaction: every Kraus operator is proportional to I
            d.p2 = n / (2.0 * n + 1.0);
            d.p1 = 1.0 - d.p2;
            d.coef_c = 1.0;
            d.coef_d = 1.0;
            return Ok(d);
        }
        if n == 0.0 {
            // vacuum bath: plain amplitude damping
            d.alpha = -(-g).exp_m1();
            d.coef_c = 1.0 - d.alpha;
            d.coef_d = 1.0 - d.alpha;
            return Ok(d);
        }

        let decay = (-g * (2.0 * n + 1.0)).exp();
        let coef_a = (2.0 * n + 1.0) / (2.0 * n) * (g * a / 2.0).sinh().powi(2)
            / (g * (2.0 * n + 1.0) / 2.0).sinh()
            * (-g * (2.0 * n + 1.0) / 2.0).exp();
        let coef_b = n / (2.0 * n + 1.0) * (1.0 - decay);
        let coef_c = coef_a + coef_b + decay;
        let coef_d = (g * a / 2.0).cosh().powi(2) * decay;
        d.coef_a = coef_a;
        d.coef_b = coef_b;
        d.coef_c = coef_c;
        d.coef_d = coef_d;

        let (ca, cb, cc, cd) = (coef_a, coef_b, coef_c, coef_d);
        let denominator = (ca + cb - cc - 1.0).powi(2) - 4.0 * cd;
        let base = ca * ca * cb + cc * cc + ca * (cb * cb - cc - cb * (1.0 + cc) - cd)
            - (1.0 + cb) * cd
            - cc * (cb + cd - 1.0);
        let radicand =
            cd * (cb - ca * cb + (ca - 1.0) * cc + cd) * (ca - ca * cb + (cb - 1.0) * cc + cd);
        let root = 2.0 * sqrt_clamped(radicand, "in p2", &d)?;

        let candidate = |sign: f64| {
            let p2 = (base + sign * root) / denominator;
            let p1 = 1.0 - p2;
            // p2·ν = B, p2·μ = A, p1·α = 1 − A − B − e^{−γ₀(2N+1)Δ}
            let nu = n / (p2 * (2.0 * n + 1.0)) * (1.0 - decay);
            let mu = (2.0 * n + 1.0) / (2.0 * p2 * n) * (g * a / 2.0).sinh().powi(2)
                / (g * (2.0 * n + 1.0) / 2.0).sinh()
                * (-g * (2.0 * n + 1.0) / 2.0).exp();
            let alpha = (1.0 - p2 * (mu + nu) - decay) / p1;
            let ok = [p2, nu, mu, alpha].into_iter().all(in_unit_interval);
            (ok, p2, nu, mu, alpha)
        };

        for (sign, branch) in [(1.0, P2Branch::Plus), (-1.0, P2Branch::Minus)] {
            let (ok, p2, nu, mu, alpha) = candidate(sign);
            if ok {
                let clamp = |x: f64| x.clamp(0.0, 1.0);
                d.p2 = clamp(p2);
                d.p1 = 1.0 - d.p2;
                d.nu = clamp(nu);
                d.mu = clamp(mu);
                d.alpha = clamp(alpha);
                d.branch = branch;
                return Ok(d);
            }
        }

        let (_, p2p, nup, mup, alp) = candidate(1.0);
        let (_, p2m, num, mum, alm) = candidate(-1.0);
        Err(Error::ChannelDomain {
            details: format!(
                "no p2 branch lands in [0,1]: plus (p2={p2p:e}, nu={nup:e}, mu={mup:e}, alpha={alp:e}), \
                 minus (p2={p2m:e}, nu={num:e}, mu={mum:e}, alpha={alm:e}); {d}"
            ),
        })
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[a, b], &[cc, d]]).expect("finite 2x2")
}

/// SGAD Kraus family `E₀…E₃`; the phase of `E₃` is the squeezing phase Φ.
pub fn sgad_channel(p: &SgadParams) -> Result<CoinChannel> {
    let d = p.derive()?;
    let z = c(0.0);
    let s1 = d.p1.sqrt();
    let s2 = d.p2.sqrt();
    let e0 = mat2(c(s1 * sqrt_clamped(1.0 - d.alpha, "1-alpha", &d)?), z, z, c(s1));
    let e1 = mat2(z, z, c(s1 * d.alpha.sqrt()), z);
    let e2 = mat2(
        c(s2 * sqrt_clamped(1.0 - d.mu, "1-mu", &d)?),
        z,
        z,
        c(s2 * sqrt_clamped(1.0 - d.nu, "1-nu", &d)?),
    );
    let e3 = mat2(
        z,
        c(s2 * d.nu.sqrt()),
        Complex64::from_polar(s2 * d.mu.sqrt(), -p.squeezing_phase),
        z,
    );
    CoinChannel::new(
        vec![e0, e1, e2, e3],
        format!(
            "sgad(T={}, gamma0={}, delta={}, r={}, phi={})",
            p.temperature, p.gamma0, p.interaction_time, p.squeezing, p.squeezing_phase
        ),
    )
}

/// Thermal-bath parameters for the unsqueezed (GAD) channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadParams {
    pub temperature: f64,
    pub gamma0: f64,
    pub interaction_time: f64,
}

/// Generalized amplitude damping: decay `|0⟩ → |1⟩` with weight
/// `(N+1)/(2N+1)`, excitation with weight `N/(2N+1)`, strength
/// `1 − e^{−γ₀(2N+1)Δ}`, `N = N_th(T)`.
pub fn gad_channel(temperature: f64, gamma0: f64, interaction_time: f64) -> Result<CoinChannel> {
    check_nonnegative("channel.temperature", temperature)?;
    check_nonnegative("channel.gamma0", gamma0)?;
    check_nonnegative("channel.interaction_time", interaction_time)?;
    let n = thermal_photons(temperature);
    let p = (n + 1.0) / (2.0 * n + 1.0);
    let gamma = -(-gamma0 * (2.0 * n + 1.0) * interaction_time).exp_m1();
    let z = c(0.0);
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let keep = (1.0 - gamma).sqrt();
    CoinChannel::new(
        vec![
            mat2(c(sp * keep), z, z, c(sp)),
            mat2(z, z, c(sp * gamma.sqrt()), z),
            mat2(c(sq), z, z, c(sq * keep)),
            mat2(z, c(sq * gamma.sqrt()), z, z),
        ],
        format!("gad(T={temperature}, gamma0={gamma0}, delta={interaction_time})"),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipKind {
    BitFlip,
    PhaseFlip,
}

/// `{√(1−p)·I, √p·X}` or `{√(1−p)·I, √p·Z}`.
pub fn flip_channel(kind: FlipKind, probability: f64) -> Result<CoinChannel> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::parameter(
            "channel.probability",
            format!("must lie in [0, 1], got {probability}"),
        ));
    }
    let z = c(0.0);
    let keep = c((1.0 - probability).sqrt());
    let flip = (probability).sqrt();
    let (pauli, label) = match kind {
        FlipKind::BitFlip => (mat2(z, c(flip), c(flip), z), "bit-flip"),
        FlipKind::PhaseFlip => (mat2(c(flip), z, z, c(-flip)), "phase-flip"),
    };
    CoinChannel::new(
        vec![mat2(keep, z, z, keep), pauli],
        format!("{label}(p={probability})"),
    )
}

/// Declarative channel choice, as written in experiment configs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelSpec {
    #[default]
    None,
    Sgad(SgadParams),
    Gad(GadParams),
    BitFlip { probability: f64 },
    PhaseFlip { probability: f64 },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Option<CoinChannel>> {
        Ok(match *self {
            ChannelSpec::None => None,
            ChannelSpec::Sgad(p) => Some(sgad_channel(&p)?),
            ChannelSpec::Gad(p) => Some(gad_channel(p.temperature, p.gamma0, p.interaction_time)?),
            ChannelSpec::BitFlip { probability } => Some(flip_channel(FlipKind::BitFlip, probability)?),
            ChannelSpec::PhaseFlip { probability } => {
                Some(flip_channel(FlipKind::PhaseFlip, probability)?)
            }
        })
    }
}
