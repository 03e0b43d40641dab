//! Integer sign exponents. Every function returns the exponent `e` of a sign
//! `(-1)^e`; only its parity matters. Index conventions follow the displayed
//! formulas: sequences are one-based in the formulas and zero-based here, so
//! `ls[0]` is `l_1`.

fn dsum(xs: &[i64]) -> i64 {
    xs.iter().sum()
}

/// `δ = k(k-1)/2 + Σ_{j=1}^k (k-j) l_j` for `m_k ∘ (T_{l_1} ⊗ … ⊗ T_{l_k})`.
pub fn delta(ls: &[usize]) -> i64 {
    let k = ls.len() as i64;
    k * (k - 1) / 2 + ls.iter().enumerate().map(|(idx, &l)| (k - (idx as i64 + 1)) * l as i64).sum::<i64>()
}

/// `η = i + (p + Σ_{t=2}^p (r_t-1)) k + Σ_{t=2}^j (r_t-1) + Σ_{t=2}^p (r_t-1)(p-t)`.
///
/// `rs = (r_1, …, r_p)`, `j` is the one-based slot of the bare identity inside
/// `m_p`, `i`/`k` are the identity counts left/right of the inner composite.
pub fn eta(i: usize, k: usize, j: usize, rs: &[usize]) -> i64 {
    let p = rs.len() as i64;
    let tail = |t: usize| rs[t - 1] as i64 - 1;
    let s_all: i64 = (2..=rs.len()).map(tail).sum();
    let s_j: i64 = (2..=j).map(tail).sum();
    let s_w: i64 = (2..=rs.len()).map(|t| tail(t) * (p - t as i64)).sum();
    i as i64 + (p + s_all) * k as i64 + s_j + s_w
}

/// `α` of the module identity's left side, `m_{p,q}∘(T_{i_1}…T_{i_p} ⊗ T^M_{l,k} ⊗ T_{j_1}…T_{j_q})`.
pub fn alpha(l: usize, k: usize, is: &[usize], js: &[usize]) -> i64 {
    let p = is.len() as i64;
    let q = js.len() as i64;
    (p + q) * (p + q + 1) / 2
        + q * (l + k) as i64
        + js.iter().enumerate().map(|(t, &j)| (q - (t as i64 + 1)) * j as i64).sum::<i64>()
        + is.iter().enumerate().map(|(t, &i)| (p + q + 1 - (t as i64 + 1)) * i as i64).sum::<i64>()
}

/// `β₁` for `T^M_{l,k}∘(id^l ⊗ m_{p,q}∘(T_{i…} ⊗ id_M ⊗ T_{j…}) ⊗ id^k)`.
pub fn beta1(l: usize, k: usize, m: usize, n: usize, is: &[usize], js: &[usize]) -> i64 {
    let p = is.len() as i64;
    let q = js.len() as i64;
    let (l, k, m, n) = (l as i64, k as i64, m as i64, n as i64);
    l + k * (m + n - l)
        + is.iter().map(|&i| i as i64 - 1).sum::<i64>()
        + is.iter().enumerate().map(|(t, &i)| (i as i64 - 1) * (p + q - (t as i64 + 1))).sum::<i64>()
        + js.iter().enumerate().map(|(t, &j)| (j as i64 - 1) * (q - (t as i64 + 1))).sum::<i64>()
}

/// `β₂`, verbatim: the bracketed factors `(p+q+1-t)` and `(q-t)` use the
/// `t` of the inner `T^M_{r,t}`, as displayed.
#[allow(clippy::too_many_arguments)]
pub fn beta2(l: usize, k: usize, m: usize, n: usize, v: usize, r: usize, t: usize, is: &[usize], js: &[usize]) -> i64 {
    let p = is.len() as i64;
    let q = js.len() as i64;
    let (l, k, m, n, r, t) = (l as i64, k as i64, m as i64, n as i64, r as i64, t as i64);
    l + k * (m + n - l)
        + is[..v].iter().map(|&i| i as i64 - 1).sum::<i64>()
        + (r + t) * q
        + is.iter().map(|&i| (i as i64 - 1) * (p + q + 1 - t)).sum::<i64>()
        + js.iter().map(|&j| (j as i64 - 1) * (q - t)).sum::<i64>()
}

/// `β₃`, verbatim in the same reading as [`beta2`].
#[allow(clippy::too_many_arguments)]
pub fn beta3(l: usize, k: usize, m: usize, n: usize, v: usize, r: usize, t: usize, is: &[usize], js: &[usize]) -> i64 {
    let p = is.len() as i64;
    let q = js.len() as i64;
    let (l, k, m, n, r, t) = (l as i64, k as i64, m as i64, n as i64, r as i64, t as i64);
    l + k * (m + n - l)
        + is.iter().map(|&i| i as i64 - 1).sum::<i64>()
        + js[..v].iter().map(|&j| j as i64 - 1).sum::<i64>()
        + (r + t) * (q - 1)
        + is.iter().map(|&i| (i as i64 - 1) * (p + q + 1 - t)).sum::<i64>()
        + js.iter().map(|&j| (j as i64 - 1) * (q - t)).sum::<i64>()
}

/// `γ = Σ_{k=1}^n (n-k+1)|b_k| + Σ_{k=1}^n (n-k)|f_k|` for the arity `2n+1`
/// operations on `∂₋₁B`.
pub fn gamma(b_degs: &[i64], f_degs: &[i64]) -> i64 {
    let n = f_degs.len() as i64;
    let bs: i64 = b_degs.iter().take(f_degs.len()).enumerate().map(|(k, &b)| (n - k as i64) * b).sum();
    let fs: i64 = f_degs.iter().enumerate().map(|(k, &f)| (n - k as i64 - 1) * f).sum();
    bs + fs
}

/// `ξ = jn + (n-1)|f_j| + (Σ_{k<j}|a_k|)(|f_j| + Σ_{k>j}|a_k|)`; `j` one-based.
pub fn xi(j: usize, f_deg: i64, a_degs: &[i64]) -> i64 {
    let n = a_degs.len() as i64;
    let before = dsum(&a_degs[..j - 1]);
    let after = dsum(&a_degs[j..]);
    j as i64 * n + (n - 1) * f_deg + before * (f_deg + after)
}

/// Dual-module sign `(j+1)(i+j+1) + (Σ|a|)(|f|+|x|+Σ|b|) + |f|(i+j-1+extra)`,
/// `extra = 0` for `m^{M∨}` and `1` for `T^{M∨}`.
pub fn dual_module(a_degs: &[i64], f_deg: i64, x_deg: i64, b_degs: &[i64], extra: i64) -> i64 {
    let i = a_degs.len() as i64;
    let j = b_degs.len() as i64;
    (j + 1) * (i + j + 1) + dsum(a_degs) * (f_deg + x_deg + dsum(b_degs)) + f_deg * (i + j - 1 + extra)
}

/// `θ = (Σ|a|)(Σ|b|) + |f|(Σ|a| + m + n + 1) + (m+n+1)(n+1)`.
pub fn theta(a_degs: &[i64], b_degs: &[i64], f_deg: i64) -> i64 {
    let m = a_degs.len() as i64;
    let n = b_degs.len() as i64;
    let sa = dsum(a_degs);
    sa * dsum(b_degs) + f_deg * (sa + m + n + 1) + (m + n + 1) * (n + 1)
}

/// The exponent `s^{a_1…a_n}_{f_1…f_n}` of the bracket extraction.
pub fn fh_s(a: &[i64], f: &[i64]) -> i64 {
    let n = a.len();
    assert_eq!(n, f.len());
    let nn = n as i64;
    let (an, f1) = (a[n - 1], f[0]);
    let mut e = an * f1 + (nn + 1) * (an + f1);
    for j in 1..=n {
        e += (nn - j as i64) * a[j - 1] + (j as i64 - 1) * f[j - 1];
    }
    for i in 1..n {
        for j in i + 1..n {
            e += a[i - 1] * a[j - 1];
        }
    }
    for i in 2..=n {
        for j in i + 1..=n {
            e += f[i - 1] * f[j - 1];
        }
    }
    for i in 2..n {
        for j in i..n {
            e += f[i - 1] * a[j - 1];
        }
    }
    e
}

/// Exponent of the `Ψ` construction, `(n-1) Σ_k |e_{i_k}|`.
pub fn psi(e_degs: &[i64]) -> i64 {
    (e_degs.len() as i64 - 1) * dsum(e_degs)
}

/// Exponent of the generalized Jacobi identity term, `i(n-i)`.
pub fn linf_jacobi(i: usize, n: usize) -> i64 {
    (i * (n - i)) as i64
}

/// Exponent of the double Jacobi term for `(⟦⟧_j ⊗ id)∘(id ⊗ ⟦⟧_i)`, `(j-1)i`.
pub fn double_jacobi(i: usize, j: usize) -> i64 {
    ((j as i64) - 1) * i as i64
}

/// Exponent of the AYBE∞ term `r_i … r_j`, `(j+1)i`.
pub fn aybe(i: usize, j: usize) -> i64 {
    ((j + 1) * i) as i64
}
