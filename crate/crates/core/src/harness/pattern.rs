//! Far-field patterns on a product grid of the unit sphere, their distance and CSV form.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64 as C;

use crate::error::Error;
use crate::special::gauss_legendre;
use crate::vec3::{self, C3, V3};

/// Gauss-Legendre in `cos θ` times trapezoid in `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Quadrature weights summing to `4π`, `θ`-major.
    pub weights: Vec<f64>,
}

impl DirectionGrid {
    pub fn new(n_theta: usize) -> Result<Self, Error> {
        if n_theta < 2 {
            return Err(Error::InvalidGeometry("direction grid needs at least two polar nodes".into()));
        }
        let n_phi = 2 * n_theta;
        let (x, w) = gauss_legendre::<f64>(n_theta);
        // descending cos θ gives increasing θ
        let theta: Vec<f64> = x.iter().rev().map(|c| c.acos()).collect();
        let wt: Vec<f64> = w.iter().rev().copied().collect();
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let phi: Vec<f64> = (0..n_phi).map(|j| dphi * j as f64).collect();
        let weights = wt.iter().flat_map(|w| std::iter::repeat(w * dphi).take(n_phi)).collect();
        Ok(Self { n_theta, n_phi, theta, phi, weights })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angles(&self, n: usize) -> (f64, f64) {
        (self.theta[n / self.n_phi], self.phi[n % self.n_phi])
    }

    pub fn direction(&self, n: usize) -> V3<f64> {
        let (t, p) = self.angles(n);
        direction(t, p)
    }

    pub fn directions(&self) -> Vec<V3<f64>> {
        (0..self.len()).map(|n| self.direction(n)).collect()
    }
}

/// Unit vector with polar angle `theta` and azimuth `phi`.
pub fn direction(theta: f64, phi: f64) -> V3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Provenance attached to a pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternMeta {
    pub scene_hash: String,
    pub incidence: String,
    pub order: usize,
    pub source: String,
}

/// Electric far-field pattern sampled on a direction grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FarFieldPattern {
    pub grid: DirectionGrid,
    pub values: Vec<C3<f64>>,
    pub meta: PatternMeta,
}

impl FarFieldPattern {
    /// Samples `f` on every grid direction.
    pub fn sample<F>(grid: DirectionGrid, meta: PatternMeta, mut f: F) -> Result<Self, Error>
    where
        F: FnMut(V3<f64>) -> Result<C3<f64>, Error>,
    {
        let values = grid.directions().into_iter().map(&mut f).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { grid, values, meta })
    }

    /// Weighted `L²` norm on the sphere.
    pub fn norm(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| w * vec3::cnorm_sqr(*v)).sum::<f64>().sqrt()
    }

    /// Largest `|x̂·E^∞|` relative to the largest `|E^∞|`.
    pub fn radial_defect(&self) -> f64 {
        let scale = self.values.iter().map(|v| vec3::cnorm(*v)).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.values.len())
            .map(|n| vec3::rcdot(self.grid.direction(n), self.values[n]).norm())
            .fold(0.0, f64::max);
        worst / scale
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), Error> {
        let m = &self.meta;
        writeln!(w, "# scene_hash={}", m.scene_hash)?;
        writeln!(w, "# incidence={}", m.incidence)?;
        writeln!(w, "# order={}", m.order)?;
        writeln!(w, "# source={}", m.source)?;
        writeln!(w, "# n_theta={}", self.grid.n_theta)?;
        writeln!(w, "theta,phi,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz")?;
        let mut line = String::new();
        for (n, v) in self.values.iter().enumerate() {
            let (t, p) = self.grid.angles(n);
            line.clear();
            // `{:?}` prints the shortest representation that parses back to the same bits
            write!(line, "{t:?},{p:?}").unwrap();
            for c in v {
                write!(line, ",{:?},{:?}", c.re, c.im).unwrap();
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, Error> {
        let mut meta = PatternMeta::default();
        let mut n_theta = None;
        let mut rows: Vec<[f64; 8]> = Vec::new();
        let mut header = false;
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(kv) = line.strip_prefix('#') {
                let (k, v) = kv.trim().split_once('=').ok_or_else(|| bad(ln, "metadata must be key=value"))?;
                match k {
                    "scene_hash" => meta.scene_hash = v.to_string(),
                    "incidence" => meta.incidence = v.to_string(),
                    "source" => meta.source = v.to_string(),
                    "order" => meta.order = v.parse().map_err(|_| bad(ln, "order"))?,
                    "n_theta" => n_theta = Some(v.parse::<usize>().map_err(|_| bad(ln, "n_theta"))?),
                    _ => return Err(bad(ln, &format!("unknown metadata key {k}"))),
                }
                continue;
            }
            if !header {
                if line != "theta,phi,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz" {
                    return Err(bad(ln, "unexpected column header"));
                }
                header = true;
                continue;
            }
            let mut row = [0.0; 8];
            let mut it = line.split(',');
            for x in row.iter_mut() {
                let s = it.next().ok_or_else(|| bad(ln, "expected 8 columns"))?;
                *x = s.trim().parse().map_err(|_| bad(ln, &format!("not a number: {s}")))?;
            }
            if it.next().is_some() {
                return Err(bad(ln, "expected 8 columns"));
            }
            rows.push(row);
        }
        let n_theta = n_theta.ok_or_else(|| Error::Parse("missing n_theta metadata".into()))?;
        let grid = DirectionGrid::new(n_theta)?;
        if rows.len() != grid.len() {
            return Err(Error::Parse(format!("expected {} rows, found {}", grid.len(), rows.len())));
        }
        let mut values = Vec::with_capacity(rows.len());
        for (n, r) in rows.iter().enumerate() {
            let (t, p) = grid.angles(n);
            if r[0].to_bits() != t.to_bits() || r[1].to_bits() != p.to_bits() {
                return Err(Error::Parse(format!("row {n} does not lie on the declared grid")));
            }
            values.push([C::new(r[2], r[3]), C::new(r[4], r[5]), C::new(r[6], r[7])]);
        }
        Ok(Self { grid, values, meta })
    }
}

fn bad(line: usize, msg: &str) -> Error {
    Error::Parse(format!("line {}: {msg}", line + 1))
}

/// Relative weighted `L²` distance `‖a − b‖ / ‖b‖` on the common grid.
pub fn farfield_distance(a: &FarFieldPattern, b: &FarFieldPattern) -> Result<f64, Error> {
    if a.grid != b.grid {
        return Err(Error::DimensionMismatch("far-field patterns live on different grids".into()));
    }
    let mut num = 0.0;
    for ((x, y), w) in a.values.iter().zip(&b.values).zip(&a.grid.weights) {
        num += w * vec3::cnorm_sqr(vec3::csub(*x, *y));
    }
    let den = b.norm();
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num.sqrt() / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FarFieldPattern {
        let grid = DirectionGrid::new(6).unwrap();
        let meta = PatternMeta { scene_hash: "abc".into(), incidence: "plane".into(), order: 12, source: "test".into() };
        FarFieldPattern::sample(grid, meta, |x| {
            let t = vec3::cross(x, [0.3, -0.1, 1.0 / 3.0]);
            Ok([C::new(t[0], 0.1 * x[2]), C::new(t[1], 1e-300), C::new(t[2], -std::f64::consts::PI)])
        })
        .unwrap()
    }

    #[test]
    fn grid_weights_integrate_polynomials() {
        let g = DirectionGrid::new(8).unwrap();
        let area: f64 = g.weights.iter().sum();
        assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        let z2: f64 = (0..g.len()).map(|n| g.weights[n] * g.direction(n)[2].powi(2)).sum();
        assert!((z2 - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let p = sample();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = FarFieldPattern::read_csv(buf.as_slice()).unwrap();
        assert_eq!(p.meta, q.meta);
        for (a, b) in p.values.iter().zip(&q.values) {
            for i in 0..3 {
                assert_eq!(a[i].re.to_bits(), b[i].re.to_bits());
                assert_eq!(a[i].im.to_bits(), b[i].im.to_bits());
            }
        }
    }

    #[test]
    fn distance_properties() {
        let p = sample();
        assert_eq!(farfield_distance(&p, &p).unwrap(), 0.0);
        let mut q = p.clone();
        for v in &mut q.values {
            *v = vec3::cscale(C::new(1.1, 0.0), *v);
        }
        assert!((farfield_distance(&q, &p).unwrap() - 0.1).abs() < 1e-12);
        let other = FarFieldPattern { grid: DirectionGrid::new(5).unwrap(), ..p.clone() };
        assert!(farfield_distance(&other, &p).is_err());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(FarFieldPattern::read_csv(cut.as_bytes()), Err(Error::Parse(_))));
        let bad = text.replacen("theta,phi", "theta,psi", 1);
        assert!(FarFieldPattern::read_csv(bad.as_bytes()).is_err());
    }
}
