//! The 1-, 2- and 3-point densities written out as signed kernel products.

use purity_core::kernel_integrals::KernelTerm;
use purity_core::ratcore::{int, Rational};

/// `K₀₀K₀₁K₁₁` products of the third density, `+` group then `-` group.
pub const HC_PLUS: [&str; 12] = [
    "00xy 01yz 11xz",
    "00xy 10zx 11zy",
    "00yx 01xz 11yz",
    "00yx 10zy 11zx",
    "00xz 01zy 11xy",
    "00xz 10yx 11yz",
    "00zx 01xy 11zy",
    "00zx 10yz 11yx",
    "00yz 01yx 11xz",
    "00yz 10xz 11yx",
    "00zy 01zx 11xy",
    "00zy 10xy 11zx",
];

pub const HC_MINUS: [&str; 12] = [
    "00xy 01xz 11yz",
    "00xy 10zy 11zx",
    "00yx 01yz 11xz",
    "00yx 10zx 11zy",
    "00xz 01xy 11zy",
    "00xz 10yz 11yx",
    "00zx 01zy 11xy",
    "00zx 10yx 11yz",
    "00yz 01zx 11xy",
    "00yz 10xy 11zx",
    "00zy 01yx 11xz",
    "00zy 10xz 11yx",
];

/// `K₀₁/K₁₀` triangles of the third density.
pub const HD: [&str; 8] = [
    "01xy 01yz 01zx",
    "01xz 01zy 10xy",
    "01xz 01yx 10yz",
    "01yx 01zy 10zx",
    "01xy 10xz 10zy",
    "01yz 10xz 10yx",
    "01zx 10yx 10zy",
    "10xy 10yz 10zx",
];

fn term(c: i64, s: &str) -> KernelTerm {
    KernelTerm::parse(int(c), s)
}

/// Multiplies two signed sums of kernel products.
pub fn product(a: &[KernelTerm], b: &[KernelTerm]) -> Vec<KernelTerm> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in a {
        for t in b {
            let mut factors = s.factors.clone();
            factors.extend(t.factors.iter().copied());
            out.push(KernelTerm { coeff: &s.coeff * &t.coeff, factors });
        }
    }
    out
}

fn scaled(v: Vec<KernelTerm>, c: i64) -> Vec<KernelTerm> {
    v.into_iter().map(|t| KernelTerm { coeff: t.coeff * int(c), factors: t.factors }).collect()
}

/// `K₀₁(u,u) + K₁₀(u,u)`.
fn diag(u: char) -> Vec<KernelTerm> {
    vec![term(1, &format!("01{u}{u}")), term(1, &format!("10{u}{u}"))]
}

/// `K₀₁K₀₁ + K₁₀K₁₀ + K₀₀K₁₁` over the pair `(u, v)` in both orientations.
fn pair(u: char, v: char) -> Vec<KernelTerm> {
    vec![
        term(1, &format!("01{u}{v} 01{v}{u}")),
        term(1, &format!("10{u}{v} 10{v}{u}")),
        term(1, &format!("00{u}{v} 11{u}{v}")),
        term(1, &format!("00{v}{u} 11{v}{u}")),
    ]
}

/// Signed kernel products whose sum, divided by the returned factor, is the
/// `order`-point density over variables `x, y, z`.
pub fn density_terms(order: usize, m: usize) -> (Vec<KernelTerm>, Rational) {
    let mi = int(m as i64);
    match order {
        1 => (diag('x'), int(2) * mi),
        2 => {
            let mut t = product(&diag('x'), &diag('y'));
            t.extend(scaled(pair('x', 'y'), -2));
            (t, int(4) * &mi * (&mi - int(1)))
        }
        3 => {
            let mut t = product(&product(&diag('x'), &diag('y')), &diag('z'));
            t.extend(scaled(product(&diag('x'), &pair('y', 'z')), -2));
            t.extend(scaled(product(&diag('y'), &pair('x', 'z')), -2));
            t.extend(scaled(product(&diag('z'), &pair('x', 'y')), -2));
            t.extend(HC_PLUS.iter().map(|s| term(2, s)));
            t.extend(HC_MINUS.iter().map(|s| term(-2, s)));
            t.extend(HD.iter().map(|s| term(2, s)));
            (t, int(8) * &mi * (&mi - int(1)) * (&mi - int(2)))
        }
        _ => panic!("densities are defined for orders 1 to 3"),
    }
}
