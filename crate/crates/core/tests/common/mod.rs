//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use qwalk_core::linalg::{ComplexMatrix, DensityMatrix};
use qwalk_core::noise::SgadParams;
use qwalk_core::{Geometry, InitialState};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[[e^{iξ}cosθ, e^{iζ}sinθ], [e^{−iζ}sinθ, −e^{−iξ}cosθ]]` from degrees.
pub fn coin(xi: f64, theta: f64, zeta: f64) -> [[Complex64; 2]; 2] {
    let (xi, th, ze) = (xi.to_radians(), theta.to_radians(), zeta.to_radians());
    [
        [Complex64::from_polar(th.cos(), xi), Complex64::from_polar(th.sin(), ze)],
        [Complex64::from_polar(th.sin(), -ze), -Complex64::from_polar(th.cos(), -xi)],
    ]
}

pub fn init_amplitudes(init: &InitialState) -> [Complex64; 2] {
    let d = init.delta.to_radians() / 2.0;
    [c(d.cos(), 0.0), Complex64::from_polar(d.sin(), init.phi.to_radians())]
}

/// Final amplitudes `ψ(c, x)` of a noiseless line walk by summing over all
/// `2^t` coin histories.
pub fn path_sum(b: [[Complex64; 2]; 2], init: [Complex64; 2], t: usize) -> BTreeMap<(usize, i64), Complex64> {
    let mut out = BTreeMap::new();
    for (c0, &a0) in init.iter().enumerate() {
        for history in 0..(1usize << t) {
            let mut amp = a0;
            let mut prev = c0;
            let mut x = 0i64;
            for k in 0..t {
                let next = (history >> k) & 1;
                amp *= b[next][prev];
                x += if next == 0 { -1 } else { 1 };
                prev = next;
            }
            *out.entry((prev, x)).or_insert(c(0.0, 0.0)) += amp;
        }
    }
    out
}

/// Row-major index into the coin ⊗ position space of `g`.
pub fn joint_index(g: &Geometry, coin: usize, x: i64) -> usize {
    let p = g.position_dim() as i64;
    let origin = g.origin_index() as i64;
    coin * p as usize + (origin + x).rem_euclid(p) as usize
}

/// Where noise acts relative to the coin and shift in the trajectory oracle.
#[derive(Clone, Copy, Debug)]
pub enum Slot {
    BeforeCoin,
    AfterCoin,
    AfterShift,
}

type Wave = BTreeMap<(usize, i64), Complex64>;

fn apply_coin_op(w: &Wave, m: &ComplexMatrix) -> Wave {
    let mut out = Wave::new();
    for (&(cin, x), &a) in w {
        for cout in 0..2 {
            let z = m[(cout, cin)] * a;
            if z != c(0.0, 0.0) {
                *out.entry((cout, x)).or_insert(c(0.0, 0.0)) += z;
            }
        }
    }
    out
}

fn shift(w: &Wave) -> Wave {
    w.iter()
        .map(|(&(cn, x), &a)| ((cn, if cn == 0 { x - 1 } else { x + 1 }), a))
        .collect()
}

/// `ρ_t = Σ_traj |ψ_traj⟩⟨ψ_traj|` over every sequence of Kraus operators,
/// each trajectory propagated as an unnormalized pure state on the integers.
pub fn trajectory_density(
    g: &Geometry,
    b: &ComplexMatrix,
    kraus: &[ComplexMatrix],
    slot: Slot,
    init: [Complex64; 2],
    t: usize,
) -> ComplexMatrix {
    let mut start = Wave::new();
    start.insert((0, 0), init[0]);
    start.insert((1, 0), init[1]);
    let mut waves = vec![start];
    for _ in 0..t {
        let mut next = Vec::with_capacity(waves.len() * kraus.len().max(1));
        for w in &waves {
            let ops: Vec<Option<&ComplexMatrix>> = if kraus.is_empty() {
                vec![None]
            } else {
                kraus.iter().map(Some).collect()
            };
            for e in ops {
                let noise = |w: Wave| match e {
                    Some(e) => apply_coin_op(&w, e),
                    None => w,
                };
                let mut v = w.clone();
                if let Slot::BeforeCoin = slot {
                    v = noise(v);
                }
                v = apply_coin_op(&v, b);
                if let Slot::AfterCoin = slot {
                    v = noise(v);
                }
                v = shift(&v);
                if let Slot::AfterShift = slot {
                    v = noise(v);
                }
                next.push(v);
            }
        }
        waves = next;
    }
    let n = g.joint_dim();
    let mut rho = ComplexMatrix::zeros(n, n);
    for w in &waves {
        let mut psi = vec![c(0.0, 0.0); n];
        for (&(cn, x), &a) in w {
            psi[joint_index(g, cn, x)] += a;
        }
        for i in 0..n {
            if psi[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                rho[(i, j)] += psi[i] * psi[j].conj();
            }
        }
    }
    rho
}

fn matmul2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut o = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn adj2(a: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn add2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2], s: Complex64) -> [[Complex64; 2]; 2] {
    let mut o = *a;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] += s * b[i][j];
        }
    }
    o
}

/// Squeezed thermal bath master equation for a qubit whose excited level is
/// `|0⟩` (`σ₋ = |1⟩⟨0|`), integrated with RK4 over one interaction time.
pub fn master_equation(p: &SgadParams, rho: [[Complex64; 2]; 2], substeps: usize) -> [[Complex64; 2]; 2] {
    let nth = if p.temperature == 0.0 { 0.0 } else { 1.0 / ((1.0 / p.temperature).exp() - 1.0) };
    let r = p.squeezing;
    let n = nth * (r.cosh().powi(2) + r.sinh().powi(2)) + r.sinh().powi(2);
    let m = Complex64::from_polar(-0.5 * (2.0 * r).sinh() * (2.0 * nth + 1.0), p.squeezing_phase);
    let g = p.gamma0;
    let sm = [[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
    let sp = adj2(&sm);
    let sp_sm = matmul2(&sp, &sm);
    let sm_sp = matmul2(&sm, &sp);
    let gen = |x: &[[Complex64; 2]; 2]| {
        let mut d = [[c(0.0, 0.0); 2]; 2];
        let dissipator = |l: &[[Complex64; 2]; 2], ld: &[[Complex64; 2]; 2], ldl: &[[Complex64; 2]; 2]| {
            let mut o = matmul2(&matmul2(l, x), ld);
            o = add2(&o, &matmul2(ldl, x), c(-0.5, 0.0));
            add2(&o, &matmul2(x, ldl), c(-0.5, 0.0))
        };
        d = add2(&d, &dissipator(&sm, &sp, &sp_sm), c(g * (n + 1.0), 0.0));
        d = add2(&d, &dissipator(&sp, &sm, &sm_sp), c(g * n, 0.0));
        d = add2(&d, &matmul2(&matmul2(&sp, x), &sp), -m * g);
        add2(&d, &matmul2(&matmul2(&sm, x), &sm), -m.conj() * g)
    };
    let h = p.interaction_time / substeps as f64;
    let mut y = rho;
    for _ in 0..substeps {
        let k1 = gen(&y);
        let k2 = gen(&add2(&y, &k1, c(h / 2.0, 0.0)));
        let k3 = gen(&add2(&y, &k2, c(h / 2.0, 0.0)));
        let k4 = gen(&add2(&y, &k3, c(h, 0.0)));
        y = add2(&y, &k1, c(h / 6.0, 0.0));
        y = add2(&y, &k2, c(h / 3.0, 0.0));
        y = add2(&y, &k3, c(h / 3.0, 0.0));
        y = add2(&y, &k4, c(h / 6.0, 0.0));
    }
    y
}

pub fn to_array(m: &ComplexMatrix) -> [[Complex64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn from_array(a: [[Complex64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&a[0], &a[1]]).unwrap()
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    // Gram-Schmidt on uniformly random complex columns
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            let ov: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ov * ui;
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-6 {
            v.iter_mut().for_each(|z| *z /= nv);
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `U diag(w) U†` with random weights; rank `rank`.
pub fn random_density(n: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let mut w: Vec<f64> = (0..n).map(|i| if i < rank { rng.gen_range(0.05..1.0) } else { 0.0 }).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    u.matmul(&ComplexMatrix::real_diagonal(&w)).unwrap().matmul(&u.adjoint()).unwrap().hermitian_part()
}

pub fn random_qubit(rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::single(random_density(2, 2, rng)).unwrap()
}
