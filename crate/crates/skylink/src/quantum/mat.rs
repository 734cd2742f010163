//! Dense complex matrices sized for few-qubit density-matrix work.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Outer product |v><v| of a (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let n = self.n * other.n;
        let mut out = CMat::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self[(i, j)];
                for k in 0..other.n {
                    for l in 0..other.n {
                        out[(i * other.n + k, j * other.n + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Partial trace of an n-qubit density matrix, keeping the listed
    /// qubits (qubit 0 = leftmost tensor factor in `kron` ordering).
    pub fn ptrace_keep(&self, num_qubits: usize, keep: &[usize]) -> CMat {
        assert_eq!(self.n, 1 << num_qubits);
        let kept = keep.len();
        let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep.contains(q)).collect();
        let mut out = CMat::zeros(1 << kept);
        // Map (kept index bits, traced index bits) into a full index. Qubit
        // 0 is the leftmost factor, i.e. the highest-order bit.
        let bit_pos = |q: usize| num_qubits - 1 - q;
        for i_k in 0..(1usize << kept) {
            for j_k in 0..(1usize << kept) {
                let mut sum = C64::new(0.0, 0.0);
                for t in 0..(1usize << traced.len()) {
                    let mut i_full = 0usize;
                    let mut j_full = 0usize;
                    for (b, q) in keep.iter().enumerate() {
                        let bit_i = (i_k >> (kept - 1 - b)) & 1;
                        let bit_j = (j_k >> (kept - 1 - b)) & 1;
                        i_full |= bit_i << bit_pos(*q);
                        j_full |= bit_j << bit_pos(*q);
                    }
                    for (b, q) in traced.iter().enumerate() {
                        let bit = (t >> (traced.len() - 1 - b)) & 1;
                        i_full |= bit << bit_pos(*q);
                        j_full |= bit << bit_pos(*q);
                    }
                    sum += self[(i_full, j_full)];
                }
                out[(i_k, j_k)] = sum;
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix via cyclic complex Jacobi sweeps.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.clone();
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let m = apq.norm();
                    if m < 1e-300 {
                        continue;
                    }
                    let phase = apq / m;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = 0.5 * (2.0 * m).atan2(app - aqq);
                    let (s, c) = theta.sin_cos();
                    // Column rotation A <- A * U with
                    // U[(p,p)]=c, U[(p,q)]=-s*phase, U[(q,p)]=s*conj(phase), U[(q,q)]=c
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c + aiq * s * phase.conj();
                        a[(i, q)] = -aip * s * phase + aiq * c;
                    }
                    // Row rotation A <- U^dagger * A
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * c + aqj * s * phase;
                        a[(q, j)] = -apj * s * phase.conj() + aqj * c;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eigs.sort_by(f64::total_cmp);
        eigs
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}
