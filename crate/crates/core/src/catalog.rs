//! The Bell functionals studied by this crate, with their known bounds.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::{BellFunctional, CorrelatorForm, Error, Result, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub functional: BellFunctional,
    pub symmetric: bool,
    pub known_quantum_value: Option<f64>,
    /// Best known value over symmetric qubit strategies.
    pub known_sqs_qubit_value: Option<f64>,
    pub source: String,
    /// False when the parameters lie outside the range where the quoted
    /// bounds are known to hold.
    pub in_domain: bool,
}

impl CatalogEntry {
    fn new(functional: BellFunctional, source: &str) -> Self {
        let symmetric = functional.is_symmetric();
        Self {
            functional,
            symmetric,
            known_quantum_value: None,
            known_sqs_qubit_value: None,
            source: source.to_string(),
            in_domain: true,
        }
    }

    fn quantum(mut self, v: f64) -> Self {
        self.known_quantum_value = Some(v);
        self
    }

    fn sqs_qubit(mut self, v: f64) -> Self {
        self.known_sqs_qubit_value = Some(v);
        self
    }

    pub fn local_bound(&self) -> Option<f64> {
        self.functional.known_local_bound
    }

    pub fn name(&self) -> &str {
        &self.functional.name
    }
}

fn chsh_form(sign_11: f64, sign_10: f64) -> CorrelatorForm {
    CorrelatorForm::new(2, 2)
        .joint(0, 0, 1.0)
        .joint(0, 1, 1.0)
        .joint(1, 0, sign_10)
        .joint(1, 1, sign_11)
}

pub fn chsh() -> CatalogEntry {
    let f = chsh_form(-1.0, 1.0)
        .into_functional("chsh")
        .expect("valid form")
        .with_local_bound(2.0);
    CatalogEntry::new(f, "CHSH in correlator form").quantum(2.0 * SQRT_2)
}

/// CHSH with Bob's settings exchanged:
/// `⟨A0B0⟩ + ⟨A0B1⟩ − ⟨A1B0⟩ + ⟨A1B1⟩`.
pub fn chsh_asymmetric() -> CatalogEntry {
    let f = chsh_form(1.0, -1.0)
        .into_functional("chsh-asym")
        .expect("valid form")
        .with_local_bound(2.0);
    CatalogEntry::new(f, "CHSH after relabeling B0 and B1").quantum(2.0 * SQRT_2)
}

/// Quantum values of the CGLMP expression `I_d` for `d = 2..=19`.
pub const CGLMP_QUANTUM_VALUES: [f64; 18] = [
    2.82842718, 2.91485425, 2.97269840, 3.01571048, 3.04970041, 3.07764831, 3.10128058,
    3.12168442, 3.13958741, 3.15549968, 3.16979224, 3.18274300, 3.19456537, 3.20542659,
    3.21546005, 3.22477378, 3.23345644, 3.24158164,
];

pub fn cglmp_value_from_i22dd(d: usize, i22dd_value: f64) -> f64 {
    let d = d as f64;
    2.0 * d / (d - 1.0) * i22dd_value + 2.0
}

pub fn i22dd_value_from_cglmp(d: usize, cglmp_value: f64) -> f64 {
    let d = d as f64;
    (cglmp_value - 2.0) * (d - 1.0) / (2.0 * d)
}

/// The CGLMP family in its manifestly symmetric `I_22dd` form (local bound 0).
pub fn i22dd(d: usize) -> Result<CatalogEntry> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("i22dd needs d ≥ 2, got {d}")));
    }
    let s = Scenario::symmetric(2, d)?;
    let mut f = BellFunctional::zeros(s, format!("i22dd-{d}"));
    for a in 0..d - 1 {
        for b in 0..d - 1 {
            if a + b <= d - 2 {
                f.add(0, 0, a, b, 1.0);
            }
            if a + b >= d - 2 {
                f.add(1, 1, a, b, -1.0);
                f.add(0, 1, a, b, 1.0);
                f.add(1, 0, a, b, 1.0);
            }
        }
    }
    for a in 0..d - 1 {
        f.add_marginal_a(0, a, -1.0);
        f.add_marginal_b(0, a, -1.0);
    }
    let mut entry = CatalogEntry::new(f.with_local_bound(0.0), "CGLMP family, I_22dd form");
    if d <= 19 {
        entry = entry.quantum(i22dd_value_from_cglmp(d, CGLMP_QUANTUM_VALUES[d - 2]));
    }
    Ok(entry)
}

/// `I_S(α)`, symmetric with local bound `2α + 5`; the quoted bounds cover
/// `α ∈ [1.5, 3]`.
pub fn i_s(alpha: f64) -> CatalogEntry {
    let mut form = CorrelatorForm::new(3, 3);
    for (x, w) in [(0, 1.0), (1, 1.0), (2, alpha)] {
        form = form.single_a(x, w).single_b(x, w);
    }
    let joints = [
        (0, 2, 1.0),
        (2, 0, 1.0),
        (2, 1, -1.0),
        (1, 2, -1.0),
        (2, 2, -1.0),
        (1, 0, -2.0),
        (0, 1, -2.0),
        (1, 1, -2.0),
    ];
    for (x, y, w) in joints {
        form = form.joint(x, y, w);
    }
    let f = form
        .into_functional(format!("is-{alpha}"))
        .expect("valid form")
        .with_local_bound(2.0 * alpha + 5.0);
    let mut entry = CatalogEntry::new(f, "I_S(alpha) family in correlator form");
    entry.in_domain = (1.5..=3.0).contains(&alpha);
    if alpha == 1.5 {
        entry = entry.quantum(25.0 / 3.0);
    } else if alpha == 2.0 {
        entry = entry.quantum((13.0 + 4.0 * 13f64.sqrt()) / 3.0);
    }
    if alpha > 1.975 && alpha <= 3.0 {
        entry = entry.sqs_qubit(2.0 * alpha + 5.0);
    }
    entry
}

/// Correlation part of I3322 (local bound 4).
pub fn i3322c() -> CatalogEntry {
    let mut form = CorrelatorForm::new(3, 3);
    for (x, y) in [(0, 1), (0, 2), (1, 0), (2, 0), (0, 0), (1, 1)] {
        form = form.joint(x, y, 1.0);
    }
    form = form.joint(1, 2, -1.0).joint(2, 1, -1.0);
    let f = form
        .into_functional("i3322c")
        .expect("valid form")
        .with_local_bound(4.0);
    CatalogEntry::new(f, "correlation part of I3322").sqs_qubit(5.0)
}

/// A symmetric facet of the (2,4,2) polytope in probability form (local bound 0).
///
/// Only half of each off-diagonal `P(0,0|x,y)` term and Alice's marginals are
/// listed explicitly; the party-swapped images are added to make `β` symmetric.
pub fn j42() -> CatalogEntry {
    let s = Scenario::symmetric(4, 2).expect("valid scenario");
    let mut f = BellFunctional::zeros(s, "j42");
    f.add(0, 0, 0, 0, -3.0);
    f.add(1, 1, 0, 0, 1.0);
    f.add(2, 2, 0, 0, -2.0);
    f.add(3, 3, 0, 0, -2.0);
    for (x, y, w) in [(2, 3, 1.0), (1, 0, 2.0), (1, 2, 2.0), (1, 3, 2.0), (0, 2, 1.0), (0, 3, 1.0)] {
        f.add(x, y, 0, 0, w);
        f.add(y, x, 0, 0, w);
    }
    for (x, w) in [(0, -1.0), (3, -1.0), (1, -4.0)] {
        f.add_marginal_a(x, 0, w);
        f.add_marginal_b(x, 0, w);
    }
    CatalogEntry::new(f.with_local_bound(0.0), "symmetric (2,4,2) facet")
        .quantum(0.6722)
        .sqs_qubit(0.5682)
}

/// Nine-setting symmetric functional built from six CHSH blocks plus
/// `Σ_{k<3} ⟨A_k B_k⟩`. Settings are numbered from 0.
pub fn i9() -> CatalogEntry {
    let mut form = CorrelatorForm::new(9, 9);
    let chsh_block = |form: CorrelatorForm, x: (usize, usize), y: (usize, usize)| {
        form.joint(x.0, y.0, 1.0)
            .joint(x.0, y.1, 1.0)
            .joint(x.1, y.0, 1.0)
            .joint(x.1, y.1, -1.0)
    };
    // Alice's settings 0..3 against Bob's 3..9, and the mirrored blocks
    for (x, y) in [((0, 1), (3, 4)), ((0, 2), (5, 6)), ((1, 2), (7, 8))] {
        form = chsh_block(form, x, y);
        form = chsh_block(form, y, x);
    }
    for k in 0..3 {
        form = form.joint(k, k, 1.0);
    }
    let f = form.into_functional("i9").expect("valid form");
    let local = 15.0;
    CatalogEntry::new(f.with_local_bound(local), "nine-setting CHSH composite")
        .quantum(12.0 * SQRT_2 + 3.0)
        .sqs_qubit(6.0 * 3f64.sqrt() + 9.0)
}

/// `ζ = 1/√2 − 1/2`.
pub fn octagon_zeta() -> f64 {
    FRAC_1_SQRT_2 - 0.5
}

/// Vertices of the parameter octagon in counter-clockwise order.
pub fn octagon_vertices() -> [(f64, f64); 8] {
    let z = octagon_zeta();
    let w = 0.5 - z;
    [
        (w, 0.0),
        (z, z),
        (0.0, w),
        (-z, z),
        (-w, 0.0),
        (-z, -z),
        (0.0, -w),
        (z, -z),
    ]
}

/// Strict interior test for the octagon.
pub fn in_octagon(r0: f64, r1: f64) -> bool {
    let v = octagon_vertices();
    (0..8).all(|k| {
        let (x0, y0) = v[k];
        let (x1, y1) = v[(k + 1) % 8];
        (x1 - x0) * (r1 - y0) - (y1 - y0) * (r0 - x0) > 1e-12
    })
}

/// True on the line `r1 = −(√2 + 1) r0` excluded from the family.
pub fn on_excluded_line(r0: f64, r1: f64) -> bool {
    (r1 + (SQRT_2 + 1.0) * r0).abs() <= 1e-12
}

/// Local bound of `I_{r0,r1}`: the largest of
/// `1/√2 ± r0 ± (√2−1) r1` and `1/√2 ± r1 ± (√2−1) r0`.
pub fn local_bound_g(r0: f64, r1: f64) -> f64 {
    let k = SQRT_2 - 1.0;
    let mut best = f64::NEG_INFINITY;
    for s0 in [1.0, -1.0] {
        for s1 in [1.0, -1.0] {
            best = best
                .max(FRAC_1_SQRT_2 + s0 * r0 + s1 * k * r1)
                .max(FRAC_1_SQRT_2 + s0 * r1 + s1 * k * r0);
        }
    }
    best
}

/// `r0[(A0+A1)/√2 − B0] + r1[(A0−A1)/√2 − B1] + CHSH/(2√2)`.
pub fn i_r0r1(r0: f64, r1: f64) -> CatalogEntry {
    let h = FRAC_1_SQRT_2;
    let k = 1.0 / (2.0 * SQRT_2);
    let form = CorrelatorForm::new(2, 2)
        .joint(0, 0, k)
        .joint(0, 1, k)
        .joint(1, 0, k)
        .joint(1, 1, -k)
        .single_a(0, (r0 + r1) * h)
        .single_a(1, (r0 - r1) * h)
        .single_b(0, -r0)
        .single_b(1, -r1);
    let f = form
        .into_functional(format!("ir-{r0}-{r1}"))
        .expect("valid form")
        .with_local_bound(local_bound_g(r0, r1));
    let mut entry = CatalogEntry::new(f, "two-parameter family maximized by the Tsirelson point").quantum(1.0);
    entry.in_domain = in_octagon(r0, r1) && !on_excluded_line(r0, r1);
    entry
}

fn parse_f64(s: &str, name: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::UnknownFunctional(name.to_string()))
}

fn split_pair(rest: &str, name: &str) -> Result<(f64, f64)> {
    for (i, ch) in rest.char_indices().skip(1) {
        if ch == '-' {
            if let (Ok(a), Ok(b)) = (rest[..i].parse::<f64>(), rest[i + 1..].parse::<f64>()) {
                return Ok((a, b));
            }
        }
    }
    Err(Error::UnknownFunctional(name.to_string()))
}

/// Looks up an entry by its command-line name.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "chsh" => return Ok(chsh()),
        "chsh-asym" => return Ok(chsh_asymmetric()),
        "i3322c" => return Ok(i3322c()),
        "j42" => return Ok(j42()),
        "i9" => return Ok(i9()),
        _ => {}
    }
    if let Some(d) = lower.strip_prefix("i22dd-") {
        let d = d
            .parse::<usize>()
            .map_err(|_| Error::UnknownFunctional(name.to_string()))?;
        return i22dd(d);
    }
    if let Some(a) = lower.strip_prefix("is-").or(lower.strip_prefix("i_s-")) {
        return Ok(i_s(parse_f64(a, name)?));
    }
    if let Some(rest) = lower.strip_prefix("ir-") {
        let (r0, r1) = split_pair(rest, name)?;
        return Ok(i_r0r1(r0, r1));
    }
    Err(Error::UnknownFunctional(name.to_string()))
}

/// Representative names with one-line descriptions.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("chsh", "CHSH, (2,2,2), symmetric"),
        ("chsh-asym", "CHSH with B0 and B1 exchanged, not symmetric"),
        ("i22dd-<d>", "CGLMP family in I_22dd form, (2,2,d), symmetric"),
        ("is-<alpha>", "I_S(alpha), (2,3,2), symmetric, alpha in [1.5,3]"),
        ("i3322c", "correlation part of I3322, (2,3,2), symmetric"),
        ("j42", "symmetric (2,4,2) facet in probability form"),
        ("i9", "nine-setting CHSH composite, (2,9,2), symmetric"),
        ("ir-<r0>-<r1>", "two-parameter family, (2,2,2), not symmetric"),
    ]
}
