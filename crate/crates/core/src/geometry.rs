//! Array construction and scalar metrics.
//!
//! Antennas lie on the y-axis, symmetric about the origin. Positions are
//! generated on an integer lattice of half-wavelength steps `d0 = λ/2` and
//! only converted to meters at the end, so shared ECA antennas are
//! deduplicated exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Array configuration and its integer parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum ArrayKind {
    /// Half-wavelength uniform linear array with `q` antennas.
    Ula { q: usize },
    /// Linear sparse array: `q` antennas spaced `u·d0` apart.
    Lsa { q: usize, u: usize },
    /// Extended coprime array made of `l` basic coprime arrays.
    Eca { m: usize, n: usize, l: usize },
}

impl ArrayKind {
    /// Antenna count implied by the parameters (after ECA deduplication).
    pub fn antenna_count(&self) -> usize {
        match *self {
            ArrayKind::Ula { q } | ArrayKind::Lsa { q, .. } => q,
            ArrayKind::Eca { m, n, l } => l * (m + n - 1) - 1,
        }
    }

    /// Sparsity as designed: 1 for the ULA, `U` for the LSA and
    /// `MN/(M+N-1)` for the ECA.
    pub fn nominal_sparsity(&self) -> f64 {
        match *self {
            ArrayKind::Ula { .. } => 1.0,
            ArrayKind::Lsa { u, .. } => u as f64,
            ArrayKind::Eca { m, n, .. } => (m * n) as f64 / (m + n - 1) as f64,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ArrayKind::Ula { q } => format!("ULA(Q={q})"),
            ArrayKind::Lsa { q, u } => format!("LSA(Q={q},U={u})"),
            ArrayKind::Eca { m, n, l } => format!("ECA(M={m},N={n},L={l})"),
        }
    }

    /// Short machine-readable tag (`ula`, `lsa`, `eca`).
    pub fn tag(&self) -> &'static str {
        match self {
            ArrayKind::Ula { .. } => "ula",
            ArrayKind::Lsa { .. } => "lsa",
            ArrayKind::Eca { .. } => "eca",
        }
    }
}

impl std::str::FromStr for ArrayKind {
    type Err = Error;

    /// Parses `ula:Q`, `lsa:Q:U` or `eca:M:N:L`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let tag = parts.next().unwrap_or_default().to_ascii_lowercase();
        let nums = parts
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad integer `{p}` in array spec `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match (tag.as_str(), nums.as_slice()) {
            ("ula", [q]) => Ok(ArrayKind::Ula { q: *q }),
            ("lsa", [q, u]) => Ok(ArrayKind::Lsa { q: *q, u: *u }),
            ("eca", [m, n, l]) => Ok(ArrayKind::Eca { m: *m, n: *n, l: *l }),
            _ => Err(Error::Config(format!(
                "array spec `{s}` must be ula:Q, lsa:Q:U or eca:M:N:L"
            ))),
        }
    }
}

/// Bookkeeping for the two-subarray view of an ECA.
///
/// Subarray 1 has `LM-1` antennas at `m·N·d0`, subarray 2 has `LN-1`
/// antennas at `n·M·d0`; they share `L-1` antennas at `i·MN·d0`. The
/// effective steering vector concatenates subarray 1 with the antennas of
/// subarray 2 that are not shared, which makes it a plain permutation of
/// the sorted array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcaLayout {
    /// Sorted-position index of each subarray-1 antenna, in `m` order.
    pub subarray1: Vec<usize>,
    /// Sorted-position index of each subarray-2 antenna, in `n` order.
    pub subarray2: Vec<usize>,
    /// Sorted-position index of every shared antenna, in `i` order.
    pub shared: Vec<usize>,
    /// `permutation[j]` is the sorted-position index of entry `j` of the
    /// concatenated vector `[subarray 1, subarray 2 without shared]`.
    pub permutation: Vec<usize>,
}

impl EcaLayout {
    /// Subarray-2 antennas that are not also in subarray 1.
    pub fn subarray2_exclusive(&self) -> impl Iterator<Item = usize> + '_ {
        self.permutation[self.subarray1.len()..].iter().copied()
    }
}

/// An immutable linear array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    kind: ArrayKind,
    wavelength: f64,
    lattice: Vec<i64>,
    positions: Vec<f64>,
    eca: Option<EcaLayout>,
}

/// Scalar metrics of an array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayMetrics {
    /// Aperture `A = max(y) - min(y)` in meters.
    pub aperture: f64,
    /// Rayleigh distance `2A²/λ` in meters.
    pub rayleigh: f64,
    /// Uniform power distance `1.2A` in meters.
    pub upd: f64,
    /// Aperture relative to a half-wavelength ULA with the same antenna count.
    pub sparsity: f64,
    /// Sparsity implied by the design parameters.
    pub nominal_sparsity: f64,
    pub antenna_count: usize,
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Builds and validates an array for the given wavelength (meters).
pub fn build_array(kind: ArrayKind, wavelength: f64) -> Result<ArrayGeometry> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be positive and finite, got {wavelength}"
        )));
    }
    let (lattice, eca) = match kind {
        ArrayKind::Ula { q } => (uniform_lattice(q, 1, "q")?, None),
        ArrayKind::Lsa { q, u } => {
            if u == 0 {
                return Err(Error::ZeroParameter("u"));
            }
            (uniform_lattice(q, u, "q")?, None)
        }
        ArrayKind::Eca { m, n, l } => {
            let (lattice, layout) = eca_lattice(m, n, l)?;
            (lattice, Some(layout))
        }
    };
    let d0 = wavelength / 2.0;
    let positions = lattice.iter().map(|&i| i as f64 * d0).collect();
    Ok(ArrayGeometry {
        kind,
        wavelength,
        lattice,
        positions,
        eca,
    })
}

fn uniform_lattice(q: usize, step: usize, name: &'static str) -> Result<Vec<i64>> {
    if q == 0 {
        return Err(Error::ZeroParameter(name));
    }
    if q.is_multiple_of(2) {
        return Err(Error::EvenQ(q));
    }
    let half = (q as i64 - 1) / 2;
    Ok((-half..=half).map(|i| i * step as i64).collect())
}

fn eca_lattice(m: usize, n: usize, l: usize) -> Result<(Vec<i64>, EcaLayout)> {
    for (value, name) in [(m, "m"), (n, "n"), (l, "l")] {
        if value == 0 {
            return Err(Error::ZeroParameter(name));
        }
    }
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "ECA requires M >= N, got M={m}, N={n}"
        )));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NonCoprime { m, n });
    }
    if !l.is_multiple_of(2) {
        return Err(Error::OddL(l));
    }
    let (mi, ni, li) = (m as i64, n as i64, l as i64);
    let sub1: Vec<i64> = (-(li * mi) / 2 + 1..=li * mi / 2 - 1).map(|k| k * ni).collect();
    let sub2: Vec<i64> = (-(li * ni) / 2 + 1..=li * ni / 2 - 1).map(|k| k * mi).collect();
    let shared: Vec<i64> = (-li / 2 + 1..=li / 2 - 1).map(|k| k * mi * ni).collect();

    let mut lattice: Vec<i64> = sub1.iter().chain(sub2.iter()).copied().collect();
    lattice.sort_unstable();
    lattice.dedup();

    let index_of = |p: i64| lattice.binary_search(&p).expect("lattice point present");
    let subarray1: Vec<usize> = sub1.iter().map(|&p| index_of(p)).collect();
    let subarray2: Vec<usize> = sub2.iter().map(|&p| index_of(p)).collect();
    let shared_idx: Vec<usize> = shared.iter().map(|&p| index_of(p)).collect();
    let mut in_sub1 = vec![false; lattice.len()];
    for &idx in &subarray1 {
        in_sub1[idx] = true;
    }
    let mut permutation = subarray1.clone();
    permutation.extend(subarray2.iter().copied().filter(|&idx| !in_sub1[idx]));
    let layout = EcaLayout {
        subarray1,
        subarray2,
        shared: shared_idx,
        permutation,
    };
    Ok((lattice, layout))
}

impl ArrayGeometry {
    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Half-wavelength reference spacing `d0`.
    pub fn d0(&self) -> f64 {
        self.wavelength / 2.0
    }

    /// Antenna y-coordinates in meters, strictly increasing.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Antenna positions in units of `d0`.
    pub fn lattice(&self) -> &[i64] {
        &self.lattice
    }

    pub fn antenna_count(&self) -> usize {
        self.positions.len()
    }

    /// Two-subarray layout; `None` unless the array is an ECA.
    pub fn eca_layout(&self) -> Option<&EcaLayout> {
        self.eca.as_ref()
    }

    pub fn aperture(&self) -> f64 {
        match (self.positions.first(), self.positions.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    pub fn metrics(&self) -> ArrayMetrics {
        let aperture = self.aperture();
        let q = self.antenna_count();
        let ula_aperture = (q as f64 - 1.0) * self.d0();
        let sparsity = if q > 1 { aperture / ula_aperture } else { 1.0 };
        ArrayMetrics {
            aperture,
            rayleigh: 2.0 * aperture * aperture / self.wavelength,
            upd: 1.2 * aperture,
            sparsity,
            nominal_sparsity: self.kind.nominal_sparsity(),
            antenna_count: q,
        }
    }

    pub fn to_document(&self) -> GeometryDocument {
        GeometryDocument {
            array: self.kind,
            lambda_m: self.wavelength,
            positions_m: self.positions.clone(),
        }
    }
}

/// JSON form of a geometry: `{kind, params, lambda_m, positions_m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryDocument {
    #[serde(flatten)]
    pub array: ArrayKind,
    pub lambda_m: f64,
    pub positions_m: Vec<f64>,
}

impl GeometryDocument {
    /// Rebuilds the geometry and checks it against the stored positions.
    pub fn to_geometry(&self) -> Result<ArrayGeometry> {
        let geometry = build_array(self.array, self.lambda_m)?;
        let matches = geometry.positions.len() == self.positions_m.len()
            && geometry
                .positions
                .iter()
                .zip(&self.positions_m)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
        if !matches {
            return Err(Error::Config(
                "stored positions do not match the array parameters".into(),
            ));
        }
        Ok(geometry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lsa_three_by_two() {
        let g = build_array(ArrayKind::Lsa { q: 3, u: 2 }, 0.01).unwrap();
        let expected = [-0.01, 0.0, 0.01];
        for (p, e) in g.positions().iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn eca_counts() {
        let g = build_array(ArrayKind::Eca { m: 7, n: 5, l: 12 }, 0.01).unwrap();
        assert_eq!(g.antenna_count(), 131);
        let g = build_array(ArrayKind::Eca { m: 5, n: 3, l: 18 }, 0.01).unwrap();
        assert_eq!(g.antenna_count(), 125);
    }

    #[test]
    fn rayleigh_distances() {
        let lam = crate::units::wavelength_from_frequency(30e9);
        let lsa = build_array(ArrayKind::Lsa { q: 101, u: 4 }, lam).unwrap().metrics();
        assert!((lsa.rayleigh - 800.0).abs() < 1e-9);
        let ula = build_array(ArrayKind::Ula { q: 101 }, lam).unwrap().metrics();
        assert!((ula.rayleigh - 50.0).abs() < 1e-9);
        let eca = build_array(ArrayKind::Eca { m: 7, n: 5, l: 12 }, lam).unwrap().metrics();
        assert!((eca.aperture - 2.05).abs() < 1e-12);
        assert!((eca.rayleigh - 840.5).abs() < 1e-9);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            build_array(ArrayKind::Eca { m: 6, n: 4, l: 4 }, 0.01),
            Err(Error::NonCoprime { m: 6, n: 4 })
        ));
        assert!(matches!(
            build_array(ArrayKind::Eca { m: 7, n: 5, l: 3 }, 0.01),
            Err(Error::OddL(3))
        ));
        assert!(matches!(
            build_array(ArrayKind::Lsa { q: 4, u: 2 }, 0.01),
            Err(Error::EvenQ(4))
        ));
        assert!(matches!(
            build_array(ArrayKind::Lsa { q: 5, u: 0 }, 0.01),
            Err(Error::ZeroParameter("u"))
        ));
        assert!(matches!(
            build_array(ArrayKind::Ula { q: 0 }, 0.01),
            Err(Error::ZeroParameter("q"))
        ));
        assert!(build_array(ArrayKind::Ula { q: 3 }, -1.0).is_err());
        assert!(build_array(ArrayKind::Eca { m: 3, n: 5, l: 2 }, 0.01).is_err());
    }

    #[test]
    fn degenerate_eca_is_uniform() {
        let g = build_array(ArrayKind::Eca { m: 1, n: 1, l: 6 }, 0.01).unwrap();
        assert_eq!(g.lattice(), &[-2, -1, 0, 1, 2]);
        let g = build_array(ArrayKind::Eca { m: 3, n: 1, l: 4 }, 0.01).unwrap();
        assert_eq!(g.antenna_count(), 4 * 3 - 1);
        assert!(g.lattice().windows(2).all(|w| w[1] - w[0] == 1));
    }

    #[test]
    fn parse_specs() {
        assert_eq!("lsa:131:3".parse::<ArrayKind>().unwrap(), ArrayKind::Lsa { q: 131, u: 3 });
        assert_eq!(
            "ECA:7:5:12".parse::<ArrayKind>().unwrap(),
            ArrayKind::Eca { m: 7, n: 5, l: 12 }
        );
        assert!("eca:7:5".parse::<ArrayKind>().is_err());
    }

    #[test]
    fn document_round_trip() {
        let g = build_array(ArrayKind::Eca { m: 4, n: 3, l: 4 }, 0.01).unwrap();
        let json = serde_json::to_string(&g.to_document()).unwrap();
        assert!(json.contains("\"kind\":\"eca\""));
        assert!(json.contains("\"lambda_m\""));
        let doc: GeometryDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(doc.to_geometry().unwrap(), g);
    }

    fn coprime_eca() -> impl Strategy<Value = (usize, usize, usize)> {
        (1usize..12, 1usize..12, 1usize..8)
            .prop_filter("coprime, M >= N", |(m, n, _)| m >= n && gcd(*m, *n) == 1)
            .prop_map(|(m, n, h)| (m, n, 2 * h))
    }

    proptest! {
        #[test]
        fn eca_invariants((m, n, l) in coprime_eca()) {
            let g = build_array(ArrayKind::Eca { m, n, l }, 0.01).unwrap();
            let lat = g.lattice();
            prop_assert_eq!(lat.len(), l * (m + n - 1) - 1);
            prop_assert!(lat.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(lat.iter().zip(lat.iter().rev()).all(|(a, b)| *a == -*b));
            let layout = g.eca_layout().unwrap();
            prop_assert_eq!(layout.subarray1.len(), l * m - 1);
            prop_assert_eq!(layout.subarray2.len(), l * n - 1);
            prop_assert_eq!(layout.shared.len(), l - 1);
            let mut perm = layout.permutation.clone();
            perm.sort_unstable();
            prop_assert_eq!(perm, (0..lat.len()).collect::<Vec<_>>());
            // Union of both subarrays reproduces the array.
            let mut union: Vec<usize> = layout.subarray1.iter().chain(&layout.subarray2).copied().collect();
            union.sort_unstable();
            union.dedup();
            prop_assert_eq!(union.len(), lat.len());
            let aperture = (l * m - 2) as i64 * n as i64;
            prop_assert_eq!(lat[lat.len() - 1] - lat[0], aperture);
            if m > 1 || n > 1 {
                prop_assert!(g.metrics().sparsity >= 1.0 - 1e-12);
            }
        }

        #[test]
        fn lsa_sparsity_equals_u(half in 1usize..80, u in 1usize..8) {
            let g = build_array(ArrayKind::Lsa { q: 2 * half + 1, u }, 0.01).unwrap();
            let mt = g.metrics();
            prop_assert!((mt.sparsity - u as f64).abs() < 1e-12);
            prop_assert!((mt.rayleigh - 2.0 * mt.aperture.powi(2) / 0.01).abs() < 1e-9);
        }
    }
}
