use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::COIN_DIM;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A completely positive map on the coin, stored as its 4×4 transfer matrix
/// `S[(a,b),(c,d)] = Σ_k E_k[a,c]·conj(E_k[b,d])`.
///
/// Applying it to a joint state only mixes the four `P×P` coin blocks, so the
/// cost is linear in the number of joint-matrix entries.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct CoinMap([[Complex64; 4]; 4]);

impl CoinMap {
    pub(crate) fn from_kraus<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>) -> Self {
        let mut s = [[ZERO; 4]; 4];
        for e in ops {
            debug_assert_eq!(e.shape(), (COIN_DIM, COIN_DIM));
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            s[a * 2 + b][c * 2 + d] += e[(a, c)] * e[(b, d)].conj();
                        }
                    }
                }
            }
        }
        CoinMap(s)
    }

    /// Applies the map to the coin factor of a `2P × 2P` joint matrix.
    pub(crate) fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let dim = rho.rows();
        let p = dim / COIN_DIM;
        let src = rho.as_slice();
        let mut out = vec![ZERO; dim * dim];
        let s = &self.0;
        for x in 0..p {
            for y in 0..p {
                let v = [
                    src[x * dim + y],
                    src[x * dim + p + y],
                    src[(p + x) * dim + y],
                    src[(p + x) * dim + p + y],
                ];
                for (ab, row) in s.iter().enumerate() {
                    let z = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                    let (a, b) = (ab / 2, ab % 2);
                    out[(a * p + x) * dim + b * p + y] = z;
                }
            }
        }
        ComplexMatrix::from_raw(dim, dim, out)
    }
}
