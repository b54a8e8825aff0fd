//! Points on `S^d` and `T^d`, distances, uniform sampling and point-set files.
//!
//! Sphere points live in the Euclidean embedding `S^d ⊂ R^{d+1}`; torus
//! points are stored in `[0, 1)^d`, reduced on construction.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fmt::sig17;

const NORM_TOL: f64 = 1e-12;
/// Tolerance applied to sphere coordinates read from text, which may have
/// been written with fewer digits.
const PARSE_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    Sphere(usize),
    Torus(usize),
}

impl Manifold {
    pub fn dim(self) -> usize {
        match self {
            Manifold::Sphere(d) | Manifold::Torus(d) => d,
        }
    }

    /// Number of stored coordinates per point.
    pub fn ambient_dim(self) -> usize {
        match self {
            Manifold::Sphere(d) => d + 1,
            Manifold::Torus(d) => d,
        }
    }

    /// Total volume: surface area of `S^d`, or 1 for `T^d`.
    pub fn volume(self) -> f64 {
        match self {
            Manifold::Sphere(d) => sphere_volume(d),
            Manifold::Torus(_) => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Manifold::Sphere(_) => "sphere",
            Manifold::Torus(_) => "torus",
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.dim())
    }
}

/// Surface area of the unit sphere `S^d`, `2π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(d: usize) -> f64 {
    let a = (d as f64 + 1.0) / 2.0;
    2.0 * (a * std::f64::consts::PI.ln() - crate::specfun::gamma::ln_gamma_pos(a)).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// # Errors
    ///
    /// Fails when the vector does not have unit norm to within `1e-12`, or
    /// has fewer than two coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_unit(&coords, NORM_TOL)?;
        Ok(Self { coords })
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn from_direction(mut v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() || v.len() < 2 {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        v.iter_mut().for_each(|c| *c /= n);
        Ok(Self { coords: v })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Reduces each coordinate into `[0, 1)`.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("torus point needs finite coordinates".into()));
        }
        coords.iter_mut().for_each(|c| *c = wrap(*c));
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Reduces `x` into `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance from `t` to the nearest integer.
pub fn dist_to_int(t: f64) -> f64 {
    (t - t.round()).abs()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn check_unit(coords: &[f64], tol: f64) -> Result<()> {
    if coords.len() < 2 {
        return Err(Error::Domain("sphere point needs at least two coordinates".into()));
    }
    let n = norm(coords);
    if (n - 1.0).abs() > tol || !n.is_finite() {
        return Err(Error::Domain(format!("sphere point has norm {n}, expected 1")));
    }
    Ok(())
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Chordal distance `|x − y|` between sphere points.
///
/// Computed from coordinate differences, which equals `√(2 − 2⟨x,y⟩)` but
/// keeps full relative accuracy for nearby points.
pub fn euclidean_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    same_dim(x.coords.len(), y.coords.len())?;
    Ok(chord(&x.coords, &y.coords))
}

pub(crate) fn chord(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Flat geodesic distance on `T^d`: `(Σ_j ‖x_j − y_j‖²)^{1/2}`.
pub fn torus_geodesic(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    same_dim(x.coords.len(), y.coords.len())?;
    Ok(x.coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| dist_to_int(a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Uniform point on `S^d` from a normalized Gaussian vector.
pub fn uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SpherePoint {
    assert!(d >= 1, "sphere dimension must be at least 1");
    loop {
        let v: Vec<f64> = (0..=d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-150 {
            return SpherePoint {
                coords: v.into_iter().map(|c| c / n).collect(),
            };
        }
    }
}

pub fn uniform_torus<R: Rng + ?Sized>(d: usize, rng: &mut R) -> TorusPoint {
    TorusPoint {
        coords: (0..d).map(|_| rng.random::<f64>()).collect(),
    }
}

/// Inverse stereographic projection from the north pole `(0, 0, 1)`:
/// `x = (2 Re z, 2 Im z, |z|² − 1) / (|z|² + 1)`.
pub fn stereographic_to_sphere(z: Complex64) -> SpherePoint {
    let r2 = z.norm_sqr();
    if !r2.is_finite() || r2 > 1e300 {
        return SpherePoint {
            coords: vec![0.0, 0.0, 1.0],
        };
    }
    let den = r2 + 1.0;
    SpherePoint {
        coords: vec![2.0 * z.re / den, 2.0 * z.im / den, (r2 - 1.0) / den],
    }
}

/// A finite configuration on a sphere or torus with flat coordinate storage.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    manifold: Manifold,
    coords: Vec<f64>,
    pub ensemble: String,
    pub seed: Option<u64>,
}

impl PointSet {
    /// Builds a point set from flat coordinates, `ambient_dim` values per point.
    ///
    /// Torus coordinates are reduced into `[0, 1)`; sphere rows must be unit
    /// vectors.
    pub fn new(manifold: Manifold, coords: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(manifold, coords, NORM_TOL)
    }

    fn with_tolerance(manifold: Manifold, mut coords: Vec<f64>, tol: f64) -> Result<Self> {
        let k = manifold.ambient_dim();
        if manifold.dim() == 0 {
            return Err(Error::Domain("manifold dimension must be at least 1".into()));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(k) {
            return Err(Error::Domain(format!(
                "need a positive multiple of {k} coordinates, got {}",
                coords.len()
            )));
        }
        match manifold {
            Manifold::Sphere(_) => {
                for row in coords.chunks(k) {
                    check_unit(row, tol)?;
                }
            }
            Manifold::Torus(_) => {
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Domain("torus coordinates must be finite".into()));
                }
                coords.iter_mut().for_each(|c| *c = wrap(*c));
            }
        }
        Ok(Self {
            manifold,
            coords,
            ensemble: String::new(),
            seed: None,
        })
    }

    pub fn from_sphere_points(points: Vec<SpherePoint>) -> Result<Self> {
        let d = points.first().map(SpherePoint::dim).ok_or_else(empty)?;
        let mut coords = Vec::with_capacity(points.len() * (d + 1));
        for p in points {
            same_dim(d, p.dim())?;
            coords.extend(p.coords);
        }
        Ok(Self {
            manifold: Manifold::Sphere(d),
            coords,
            ensemble: String::new(),
            seed: None,
        })
    }

    pub fn from_torus_points(points: Vec<TorusPoint>) -> Result<Self> {
        let d = points.first().map(TorusPoint::dim).ok_or_else(empty)?;
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            same_dim(d, p.dim())?;
            coords.extend(p.coords);
        }
        Ok(Self {
            manifold: Manifold::Torus(d),
            coords,
            ensemble: String::new(),
            seed: None,
        })
    }

    pub fn with_meta(mut self, ensemble: impl Into<String>, seed: Option<u64>) -> Self {
        self.ensemble = ensemble.into();
        self.seed = seed;
        self
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.manifold.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let k = self.manifold.ambient_dim();
        &self.coords[i * k..(i + 1) * k]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.manifold.ambient_dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Requires a sphere of dimension `d`.
    pub fn expect_sphere(&self, d: Option<usize>) -> Result<usize> {
        match self.manifold {
            Manifold::Sphere(k) if d.is_none_or(|d| d == k) => Ok(k),
            m => Err(Error::Domain(format!(
                "expected points on a sphere{}, got {m}",
                d.map(|d| format!(" of dimension {d}")).unwrap_or_default()
            ))),
        }
    }

    /// Requires a torus of dimension `d`.
    pub fn expect_torus(&self, d: Option<usize>) -> Result<usize> {
        match self.manifold {
            Manifold::Torus(k) if d.is_none_or(|d| d == k) => Ok(k),
            m => Err(Error::Domain(format!(
                "expected points on a torus{}, got {m}",
                d.map(|d| format!(" of dimension {d}")).unwrap_or_default()
            ))),
        }
    }

    /// Translates a torus configuration by `shift` (mod 1).
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        self.expect_torus(Some(shift.len()))?;
        let coords = self
            .points()
            .flat_map(|p| p.iter().zip(shift).map(|(a, b)| a + b))
            .collect();
        let mut out = Self::new(self.manifold, coords)?;
        out.ensemble = self.ensemble.clone();
        out.seed = self.seed;
        Ok(out)
    }

    /// Writes the CSV format: `#` header lines with metadata, then one
    /// comma-separated row of coordinates per point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# manifold={}", self.manifold.name())?;
        writeln!(w, "# d={}", self.manifold.dim())?;
        if !self.ensemble.is_empty() {
            writeln!(w, "# ensemble={}", self.ensemble)?;
        }
        if let Some(seed) = self.seed {
            writeln!(w, "# seed={seed}")?;
        }
        let mut line = String::new();
        for p in self.points() {
            line.clear();
            for (j, c) in p.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&sig17(*c));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// Parses the CSV format written by [`PointSet::write_csv`].
    ///
    /// # Errors
    ///
    /// Malformed headers or rows give [`Error::Parse`] with the 1-based line.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut kind: Option<String> = None;
        let mut dim: Option<usize> = None;
        let mut ensemble = String::new();
        let mut seed = None;
        let mut coords = Vec::new();
        let mut width: Option<usize> = None;
        let mut last_line = 0;
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if let Some(h) = line.strip_prefix('#') {
                let Some((key, value)) = h.trim().split_once('=') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "manifold" => kind = Some(value.to_string()),
                    "d" => {
                        dim = Some(value.parse().map_err(|e| perr(format!("bad d: {e}")))?)
                    }
                    "ensemble" => ensemble = value.to_string(),
                    "seed" => {
                        seed = Some(value.parse().map_err(|e| perr(format!("bad seed: {e}")))?)
                    }
                    _ => {}
                }
                continue;
            }
            let before = coords.len();
            for field in line.split(',') {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|e| perr(format!("bad number `{}`: {e}", field.trim())))?;
                if !v.is_finite() {
                    return Err(perr(format!("non-finite coordinate `{}`", field.trim())));
                }
                coords.push(v);
            }
            let n = coords.len() - before;
            match width {
                None => width = Some(n),
                Some(w) if w != n => {
                    return Err(perr(format!("expected {w} coordinates, found {n}")));
                }
                _ => {}
            }
            if let (Some(k), Some(d)) = (kind.as_deref(), dim) {
                let expect = if k == "sphere" { d + 1 } else { d };
                if n != expect {
                    return Err(perr(format!("expected {expect} coordinates, found {n}")));
                }
                if k == "sphere" {
                    check_unit(&coords[before..], PARSE_NORM_TOL).map_err(|e| perr(e.to_string()))?;
                }
            }
        }
        let perr = |msg: &str| Error::Parse {
            line: last_line.max(1),
            msg: msg.to_string(),
        };
        let d = dim.ok_or_else(|| perr("missing `# d=` header"))?;
        let manifold = match kind.as_deref() {
            Some("sphere") => Manifold::Sphere(d),
            Some("torus") => Manifold::Torus(d),
            Some(other) => return Err(perr(&format!("unknown manifold `{other}`"))),
            None => return Err(perr("missing `# manifold=` header")),
        };
        if coords.is_empty() {
            return Err(perr("no points"));
        }
        let set = Self::with_tolerance(manifold, coords, PARSE_NORM_TOL)?;
        Ok(set.with_meta(ensemble, seed))
    }
}

fn empty() -> Error {
    Error::Domain("a point set needs at least one point".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sp(v: &[f64]) -> SpherePoint {
        SpherePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn chordal_distances() {
        let x = sp(&[1.0, 0.0, 0.0]);
        assert_eq!(euclidean_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&x, &sp(&[-1.0, 0.0, 0.0])).unwrap(), 2.0);
        let o = euclidean_distance(&x, &sp(&[0.0, 1.0, 0.0])).unwrap();
        assert!((o - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            euclidean_distance(&x, &sp(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn torus_distances() {
        let a = TorusPoint::new(vec![0.1]).unwrap();
        let b = TorusPoint::new(vec![0.9]).unwrap();
        assert!((torus_geodesic(&a, &b).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(torus_geodesic(&a, &a).unwrap(), 0.0);
        let o = TorusPoint::new(vec![0.0, 0.0]).unwrap();
        let h = TorusPoint::new(vec![0.5, 0.5]).unwrap();
        assert!((torus_geodesic(&o, &h).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn torus_reduction() {
        let p = TorusPoint::new(vec![-0.25, 1.5, 3.0, -1e-20]).unwrap();
        assert_eq!(p.coords(), &[0.75, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn stereographic_landmarks() {
        assert_eq!(stereographic_to_sphere(Complex64::new(0.0, 0.0)).coords(), &[0.0, 0.0, -1.0]);
        let e = stereographic_to_sphere(Complex64::from_polar(1.0, 0.7));
        assert!(e.coords()[2].abs() < 1e-16);
        assert_eq!(stereographic_to_sphere(Complex64::new(1.0, 0.0)).coords(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn sphere_volumes() {
        use std::f64::consts::PI;
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn uniform_sphere_is_unit_and_centered() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let n = 20_000;
        let mut mean = 0.0;
        for _ in 0..n {
            let p = uniform_sphere(2, &mut rng);
            assert!((norm(p.coords()) - 1.0).abs() < 1e-12);
            mean += p.coords()[0];
        }
        mean /= n as f64;
        // sd of x_1 is 1/√3
        assert!(mean.abs() < 4.0 / (3.0 * n as f64).sqrt());
    }

    #[test]
    fn archimedes_projection_uniform() {
        // ⟨x, p⟩ is uniform on [−1, 1] on S²: χ² over 20 bins
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let p = [0.6, 0.0, 0.8];
        let n = 40_000;
        let mut bins = [0usize; 20];
        for _ in 0..n {
            let x = uniform_sphere(2, &mut rng);
            let t: f64 = x.coords().iter().zip(&p).map(|(a, b)| a * b).sum();
            bins[(((t + 1.0) / 2.0 * 20.0) as usize).min(19)] += 1;
        }
        let e = n as f64 / 20.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - e).powi(2) / e).sum();
        // 0.999 quantile of χ²(19) is about 43.8
        assert!(chi2 < 43.8, "chi2 = {chi2}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pts: Vec<_> = (0..17).map(|_| uniform_sphere(2, &mut rng)).collect();
        let set = PointSet::from_sphere_points(pts).unwrap().with_meta("iid", Some(99));
        let text = set.to_csv_string();
        assert!(text.starts_with("# manifold=sphere\n# d=2\n# ensemble=iid\n# seed=99\n"));
        let back = PointSet::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, set);

        let t = PointSet::new(Manifold::Torus(2), vec![0.1, 0.2, 0.3, 0.999_999_999_999_999_9])
            .unwrap();
        assert_eq!(PointSet::read_csv(t.to_csv_string().as_bytes()).unwrap(), t);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let bad = "# manifold=torus\n# d=1\n0.5\nabc\n";
        match PointSet::read_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_width = "# manifold=sphere\n# d=2\n1,0,0\n0,1\n";
        assert!(matches!(
            PointSet::read_csv(wrong_width.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
        let off_sphere = "# manifold=sphere\n# d=2\n1,1,0\n";
        assert!(matches!(
            PointSet::read_csv(off_sphere.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(PointSet::read_csv("0.1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn stereographic_stays_on_sphere(r in 0.0f64..1e8, th in 0.0f64..6.3) {
            let x = stereographic_to_sphere(Complex64::from_polar(r, th));
            prop_assert!((norm(x.coords()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn triangle_inequality(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = uniform_sphere(3, &mut rng);
            let b = uniform_sphere(3, &mut rng);
            let c = uniform_sphere(3, &mut rng);
            let ab = euclidean_distance(&a, &b).unwrap();
            let bc = euclidean_distance(&b, &c).unwrap();
            let ac = euclidean_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn torus_distance_bounded(d in 1usize..6, seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = uniform_torus(d, &mut rng);
            let b = uniform_torus(d, &mut rng);
            prop_assert!(torus_geodesic(&a, &b).unwrap() <= (d as f64).sqrt() / 2.0 + 1e-15);
            let shift: Vec<f64> = a.coords().iter().map(|c| c + 0.5).collect();
            let h = TorusPoint::new(shift).unwrap();
            let dist = torus_geodesic(&a, &h).unwrap();
            prop_assert!((dist - (d as f64).sqrt() / 2.0).abs() < 1e-12);
        }
    }
}
