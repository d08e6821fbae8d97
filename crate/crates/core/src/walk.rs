//! Coin and shift operators, walk states and the noisy step.
//!
//! The joint space is `coin ⊗ position` with the coin as the first factor,
//! so joint index `c·P + x` addresses coin `c` at position index `x`.
//! Coin `|0⟩` moves the walker one site left, coin `|1⟩` one site right.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CoinMap, ComplexMatrix, DensityMatrix, COIN_DIM};
use crate::noise::{ChannelSpec, CoinChannel};

/// Coin angles `(ξ, θ, ζ)` in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinParams {
    #[serde(default)]
    pub xi: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub zeta: f64,
}

fn default_theta() -> f64 {
    45.0
}

impl Default for CoinParams {
    /// The balanced coin `B(0°, 45°, 0°)`.
    fn default() -> Self {
        Self {
            xi: 0.0,
            theta: 45.0,
            zeta: 0.0,
        }
    }
}

impl CoinParams {
    pub fn new(xi: f64, theta: f64, zeta: f64) -> Result<Self> {
        let p = Self { xi, theta, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("coin.xi", self.xi), ("coin.theta", self.theta), ("coin.zeta", self.zeta)] {
            if !v.is_finite() {
                return Err(Error::parameter(name, "angle must be finite"));
            }
        }
        Ok(())
    }

    /// Angles reduced to `[0°, 360°)`.
    pub fn normalized(&self) -> Self {
        Self {
            xi: self.xi.rem_euclid(360.0),
            theta: self.theta.rem_euclid(360.0),
            zeta: self.zeta.rem_euclid(360.0),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        coin_matrix(self)
    }
}

/// `B = [[e^{iξ}cosθ, e^{iζ}sinθ], [e^{−iζ}sinθ, −e^{−iξ}cosθ]]`
pub fn coin_matrix(p: &CoinParams) -> ComplexMatrix {
    let p = p.normalized();
    let (xi, theta, zeta) = (p.xi.to_radians(), p.theta.to_radians(), p.zeta.to_radians());
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_rows(&[
        &[Complex64::from_polar(c, xi), Complex64::from_polar(s, zeta)],
        &[Complex64::from_polar(s, -zeta), -Complex64::from_polar(c, -xi)],
    ])
    .expect("finite angles")
}

/// Initial coin `cos(δ/2)|0⟩ + sin(δ/2)e^{iφ}|1⟩`, angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default = "default_right_angle")]
    pub delta: f64,
    #[serde(default = "default_right_angle")]
    pub phi: f64,
}

fn default_right_angle() -> f64 {
    90.0
}

impl Default for InitialState {
    /// `(|0⟩ + i|1⟩)/√2`, the symmetric starting coin.
    fn default() -> Self {
        Self {
            delta: 90.0,
            phi: 90.0,
        }
    }
}

impl InitialState {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("init.delta", self.delta), ("init.phi", self.phi)] {
            if !v.is_finite() {
                return Err(Error::parameter(name, "angle must be finite"));
            }
        }
        Ok(())
    }

    pub fn coin_amplitudes(&self) -> [Complex64; 2] {
        let half = self.delta.to_radians() / 2.0;
        [
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), self.phi.to_radians()),
        ]
    }
}

/// Lattice the walker lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Sites `−t_max ..= t_max`; the walk may run at most `t_max` steps.
    Line { t_max: usize },
    /// Odd ring of `sites = 2s + 1` positions `0 .. n`, arithmetic mod n.
    Cycle { sites: usize },
}

impl Geometry {
    pub fn line(t_max: usize) -> Result<Self> {
        if t_max == 0 {
            return Err(Error::Geometry("a line needs room for at least one step".into()));
        }
        Ok(Geometry::Line { t_max })
    }

    pub fn cycle(sites: usize) -> Result<Self> {
        if sites < 3 || sites.is_multiple_of(2) {
            return Err(Error::Geometry(format!(
                "cycle size must be odd and at least 3, got {sites}"
            )));
        }
        Ok(Geometry::Cycle { sites })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Geometry::Line { t_max } => Self::line(t_max).map(|_| ()),
            Geometry::Cycle { sites } => Self::cycle(sites).map(|_| ()),
        }
    }

    pub fn position_dim(&self) -> usize {
        match *self {
            Geometry::Line { t_max } => 2 * t_max + 1,
            Geometry::Cycle { sites } => sites,
        }
    }

    pub fn joint_dim(&self) -> usize {
        COIN_DIM * self.position_dim()
    }

    /// Site label of each position index.
    pub fn site_labels(&self) -> Vec<i64> {
        match *self {
            Geometry::Line { t_max } => {
                let t = t_max as i64;
                (-t..=t).collect()
            }
            Geometry::Cycle { sites } => (0..sites as i64).collect(),
        }
    }

    /// Position index of site 0.
    pub fn origin_index(&self) -> usize {
        match *self {
            Geometry::Line { t_max } => t_max,
            Geometry::Cycle { .. } => 0,
        }
    }

    /// Sites per arm `s` of a cycle `n = 2s + 1`.
    pub fn arm_length(&self) -> Option<usize> {
        match *self {
            Geometry::Line { .. } => None,
            Geometry::Cycle { sites } => Some((sites - 1) / 2),
        }
    }

    /// Turns `τ = t / s` completed after `t` steps on a cycle.
    pub fn turns(&self, t: usize) -> Option<f64> {
        self.arm_length().map(|s| t as f64 / s as f64)
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Geometry::Cycle { .. })
    }
}

/// Where the coin noise acts within one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePlacement {
    #[default]
    BeforeCoin,
    AfterCoin,
    AfterShift,
}

/// Joint density matrix after `t` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    rho: DensityMatrix,
    geometry: Geometry,
    t: usize,
}

impl WalkState {
    pub fn new(rho: DensityMatrix, geometry: Geometry, t: usize) -> Result<Self> {
        if rho.factors() != Some((COIN_DIM, geometry.position_dim())) {
            return Err(Error::DimensionMismatch(format!(
                "state factorization {:?} does not match geometry {geometry:?}",
                rho.factors()
            )));
        }
        Ok(Self { rho, geometry, t })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn t(&self) -> usize {
        self.t
    }
}

/// Controlled shift `U` (line) or `U^c` (cycle) on the joint space.
///
/// On the truncated line the outermost sites wrap around; the walk never
/// reaches them because [`step`] refuses to run past `t_max`.
pub fn shift_operator(g: &Geometry) -> ComplexMatrix {
    let p = g.position_dim();
    let dim = COIN_DIM * p;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for x in 0..p {
        u[((x + p - 1) % p, x)] = Complex64::new(1.0, 0.0);
        u[(p + (x + 1) % p, p + x)] = Complex64::new(1.0, 0.0);
    }
    u
}

/// `|Ψ_in⟩⟨Ψ_in|` with the walker at site 0.
pub fn initial_state(init: &InitialState, g: &Geometry) -> WalkState {
    let p = g.position_dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); COIN_DIM * p];
    let [a, b] = init.coin_amplitudes();
    psi[g.origin_index()] = a;
    psi[p + g.origin_index()] = b;
    let rho = DensityMatrix::pure(&psi, COIN_DIM, p).expect("normalized amplitudes");
    WalkState {
        rho,
        geometry: *g,
        t: 0,
    }
}

fn shift_joint(rho: &ComplexMatrix, p: usize) -> ComplexMatrix {
    let dim = rho.rows();
    let src = rho.as_slice();
    // destination index x' receives source x'+1 for coin 0 and x'−1 for coin 1
    let source = |c: usize, x: usize| -> usize {
        let from = if c == 0 { (x + 1) % p } else { (x + p - 1) % p };
        c * p + from
    };
    let rows: Vec<usize> = (0..dim).map(|i| source(i / p, i % p)).collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    let dst = out.as_mut_slice();
    for (i, &si) in rows.iter().enumerate() {
        let src_row = &src[si * dim..(si + 1) * dim];
        let dst_row = &mut dst[i * dim..(i + 1) * dim];
        for (d, &sj) in dst_row.iter_mut().zip(&rows) {
            *d = src_row[sj];
        }
    }
    out
}

/// One walk step: `ρ → U (B⊗I) Λ(ρ) (B⊗I)† U†` with the noise `Λ` placed
/// according to `placement`, then re-symmetrized.
pub fn step(
    s: &WalkState,
    coin: &ComplexMatrix,
    channel: Option<&CoinChannel>,
    placement: NoisePlacement,
) -> Result<WalkState> {
    let maps = StepMaps::new(coin, channel, None)?;
    maps.step(s, placement)
}

/// Precomputed coin transfer matrices for repeated steps.
struct StepMaps {
    coin: CoinMap,
    noise: Option<CoinMap>,
    gate: Option<CoinMap>,
}

fn check_coin_shape(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.shape() != (COIN_DIM, COIN_DIM) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be 2x2, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl StepMaps {
    fn new(coin: &ComplexMatrix, channel: Option<&CoinChannel>, gate: Option<&ComplexMatrix>) -> Result<Self> {
        check_coin_shape(coin, "coin operator")?;
        if let Some(g) = gate {
            check_coin_shape(g, "gate")?;
        }
        Ok(Self {
            coin: CoinMap::from_kraus([coin]),
            noise: channel.map(CoinChannel::coin_map),
            gate: gate.map(|g| CoinMap::from_kraus([g])),
        })
    }

    fn step(&self, s: &WalkState, placement: NoisePlacement) -> Result<WalkState> {
        if let Geometry::Line { t_max } = s.geometry {
            if s.t >= t_max {
                return Err(Error::Capacity { t: s.t, t_max });
            }
        }
        let p = s.geometry.position_dim();
        let mut m = s.rho.matrix().clone();
        let noise = |m: ComplexMatrix| match &self.noise {
            Some(n) => n.apply(&m),
            None => m,
        };
        if placement == NoisePlacement::BeforeCoin {
            m = noise(m);
        }
        m = self.coin.apply(&m);
        if placement == NoisePlacement::AfterCoin {
            m = noise(m);
        }
        if let Some(g) = &self.gate {
            m = g.apply(&m);
        }
        m = shift_joint(&m, p);
        if placement == NoisePlacement::AfterShift {
            m = noise(m);
        }
        Ok(WalkState {
            rho: DensityMatrix::from_evolved(m, s.rho.factors()),
            geometry: s.geometry,
            t: s.t + 1,
        })
    }
}

/// Applies [`step`] `t` times.
pub fn evolve(
    init: &WalkState,
    coin: &ComplexMatrix,
    channel: Option<&CoinChannel>,
    placement: NoisePlacement,
    t: usize,
) -> Result<WalkState> {
    evolve_with(init, coin, channel, placement, t, |_| Ok(()))
}

/// Like [`evolve`], calling `observe` on every state after each step.
pub fn evolve_with(
    init: &WalkState,
    coin: &ComplexMatrix,
    channel: Option<&CoinChannel>,
    placement: NoisePlacement,
    t: usize,
    observe: impl FnMut(&WalkState) -> Result<()>,
) -> Result<WalkState> {
    evolve_inner(init, StepMaps::new(coin, channel, None)?, placement, t, observe)
}

fn evolve_inner(
    init: &WalkState,
    maps: StepMaps,
    placement: NoisePlacement,
    t: usize,
    mut observe: impl FnMut(&WalkState) -> Result<()>,
) -> Result<WalkState> {
    if let Geometry::Line { t_max } = init.geometry {
        if init.t + t > t_max {
            return Err(Error::Capacity { t: init.t, t_max });
        }
    }
    let mut state = init.clone();
    for _ in 0..t {
        state = maps.step(&state, placement)?;
        observe(&state)?;
    }
    Ok(state)
}

/// Everything that defines one walk apart from its duration.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSetup {
    pub geometry: Geometry,
    pub coin: CoinParams,
    pub init: InitialState,
    pub channel: Option<CoinChannel>,
    pub placement: NoisePlacement,
}

impl WalkSetup {
    pub fn noiseless(geometry: Geometry) -> Self {
        Self {
            geometry,
            coin: CoinParams::default(),
            init: InitialState::default(),
            channel: None,
            placement: NoisePlacement::default(),
        }
    }

    pub fn with_channel(self, spec: &ChannelSpec) -> Result<Self> {
        Ok(Self {
            channel: spec.build()?,
            ..self
        })
    }

    pub fn initial_state(&self) -> WalkState {
        initial_state(&self.init, &self.geometry)
    }

    /// Runs `steps` steps with `gate` applied to the coin right before
    /// every shift, after any noise that follows the coin.
    pub fn run_gated(
        &self,
        gate: Option<&ComplexMatrix>,
        steps: usize,
        observe: impl FnMut(&WalkState) -> Result<()>,
    ) -> Result<WalkState> {
        let maps = StepMaps::new(&self.coin.matrix(), self.channel.as_ref(), gate)?;
        evolve_inner(&self.initial_state(), maps, self.placement, steps, observe)
    }

    pub fn run(&self, steps: usize, observe: impl FnMut(&WalkState) -> Result<()>) -> Result<WalkState> {
        self.run_gated(None, steps, observe)
    }
}
