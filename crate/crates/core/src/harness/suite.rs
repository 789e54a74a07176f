//! The verification suite run by `verify`, and convergence tables.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bie::{Assembly, Options};
use crate::error::Error;
use crate::fields::{Incident, Layer, TraceData};
use crate::geometry::Shape;
use crate::harness::checks::{self, random_polarization, random_rotation};
use crate::harness::pattern::{farfield_distance, DirectionGrid, PatternMeta};
use crate::harness::report::{CheckResult, Criterion, VerificationReport};
use crate::harness::scene_file::scene_hash;
use crate::media::{Scene, WaveNumbers};
use crate::mie::MieScene;
use crate::tolerances as tol;
use crate::vec3::{self, V3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Uniqueness,
    Residuals,
    Reciprocity,
    Energy,
    Radiation,
    Equivariance,
    Oracle,
    SingleSurface,
    Discrimination,
    Operators,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Operators,
        CheckKind::Uniqueness,
        CheckKind::Residuals,
        CheckKind::Reciprocity,
        CheckKind::Energy,
        CheckKind::Radiation,
        CheckKind::Equivariance,
        CheckKind::Oracle,
        CheckKind::SingleSurface,
        CheckKind::Discrimination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Uniqueness => "uniqueness",
            CheckKind::Residuals => "residuals",
            CheckKind::Reciprocity => "reciprocity",
            CheckKind::Energy => "energy",
            CheckKind::Radiation => "radiation",
            CheckKind::Equivariance => "equivariance",
            CheckKind::Oracle => "oracle",
            CheckKind::SingleSurface => "single-surface",
            CheckKind::Discrimination => "discrimination",
            CheckKind::Operators => "operators",
        }
    }

    /// Whether the check makes sense for `scene` (used to pick the default set).
    pub fn applies_to(self, scene: &Scene<f64>) -> bool {
        match self {
            CheckKind::Equivariance => concentric(scene),
            CheckKind::Oracle => MieScene::from_scene(scene).is_ok(),
            CheckKind::SingleSurface => transparent(&scene.media),
            _ => true,
        }
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s}; known: {}", CheckKind::ALL.map(|k| k.name()).join(", "))))
    }
}

fn concentric(scene: &Scene<f64>) -> bool {
    scene.interface.is_centered_sphere(1e-12).is_some() && scene.obstacle.is_centered_sphere(1e-12).is_some()
}

fn transparent(m: &WaveNumbers<f64>) -> bool {
    (m.k1 - m.k0c()).norm() <= 1e-14 * m.k0 && (m.lambda_e - C::new(1.0, 0.0)).norm() <= 1e-14
}

/// Obstacle enlarged by 10 percent about its center.
pub fn enlarged_obstacle(scene: &Scene<f64>) -> Scene<f64> {
    let mut out = scene.clone();
    out.obstacle.shape = match &scene.obstacle.shape {
        Shape::Sphere { radius } => Shape::Sphere { radius: 1.1 * radius },
        Shape::Ellipsoid { semi_axes } => Shape::Ellipsoid { semi_axes: semi_axes.map(|a| 1.1 * a) },
        Shape::PerturbedSphere { radius, modes } => Shape::PerturbedSphere { radius: 1.1 * radius, modes: modes.clone() },
    };
    out
}

/// Plane wave drawn from the seed.
pub fn seeded_plane_wave(seed: u64) -> (V3<f64>, V3<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_rotation(&mut rng)[2];
    let q = random_polarization(&mut rng, d);
    (vec3::normalize(d), q)
}

/// Polar node count of the direction grid used for pattern comparisons.
pub const PATTERN_GRID: usize = 10;

struct Ctx<'a> {
    scene: &'a Scene<f64>,
    asm: Assembly<f64>,
    seed: u64,
    d: V3<f64>,
    q: V3<f64>,
    reciprocity_floor: Option<f64>,
}

impl Ctx<'_> {
    fn plane(&self) -> Result<Incident<f64>, Error> {
        Incident::plane_wave(self.d, self.q)
    }

    fn reciprocity(&mut self, out: &mut Vec<CheckResult>) -> Result<f64, Error> {
        let order = self.scene.order;
        let mut worst: f64 = 0.0;
        for (layer, name) in [(Layer::Outer, "reciprocity_exterior"), (Layer::Inner, "reciprocity_layer")] {
            let r = checks::seeded_reciprocity(&self.asm, layer, self.seed + 1)?;
            worst = worst.max(r.residual());
            out.push(CheckResult::new(name, order, r.residual(), Criterion::AtMost(tol::RECIPROCITY)).with_note(format!("lhs={:.6e} rhs={:.6e}", r.lhs, r.rhs)));
        }
        self.reciprocity_floor = Some(worst);
        Ok(worst)
    }

    fn run(&mut self, kind: CheckKind) -> Result<Vec<CheckResult>, Error> {
        let order = self.scene.order;
        let mut out = Vec::new();
        match kind {
            CheckKind::Operators => {
                out.push(CheckResult::new("operator_shat_constant", 12, checks::check_shat_constant(12)?, Criterion::AtMost(tol::SHAT_CONSTANT)));
                out.push(CheckResult::new("operator_rotation_square", 8, checks::check_rotation_square(self.seed)?, Criterion::AtMost(tol::ROTATION_SQUARE)));
                let matched = Scene { media: WaveNumbers::homogeneous(self.scene.media.k0), ..self.scene.with_order(8) };
                out.push(CheckResult::new("operator_matched_layer", 8, checks::check_matched_layer_block(&matched)?, Criterion::AtMost(tol::MATCHED_LAYER_BLOCK)));
            }
            CheckKind::Uniqueness => {
                let tr = self.asm.shared.traces(&self.plane()?)?;
                let z = |v: &Vec<_>| vec![[C::new(0.0, 0.0); 3]; v.len()];
                let zero = TraceData { t1: z(&tr.t1), t2: z(&tr.t2), t3: z(&tr.t3), t4: z(&tr.t4) };
                let sol = self.asm.solve(&zero)?;
                out.push(CheckResult::new("uniqueness_zero_data", order, sol.densities.max_norm(), Criterion::AtMost(tol::ZERO_TRACE_DENSITY)));
            }
            CheckKind::Residuals => {
                let inc = self.plane()?;
                let sol = self.asm.solve_incident(&inc)?;
                let r = sol.boundary_residuals(&inc, order + 1)?;
                out.push(CheckResult::new("solve_residual", order, sol.diagnostics.residual, Criterion::AtMost(1e-10)).with_note(format!("condition={:.3e}", sol.diagnostics.condition)));
                out.push(CheckResult::new("boundary_residual", order, r.max(), Criterion::AtMost(tol::TRANSMISSION_RESIDUAL)).with_note(format!(
                    "interface_e={:.2e} interface_h={:.2e} conducting={:.2e} impedance={:.2e} divergence={:.2e} probes={}",
                    r.interface_e, r.interface_h, r.conducting, r.impedance, r.divergence, r.probes
                )));
            }
            CheckKind::Reciprocity => {
                self.reciprocity(&mut out)?;
            }
            CheckKind::Energy => {
                let inc = self.plane()?;
                let sol = self.asm.solve_incident(&inc)?;
                let v = checks::check_energy_inequality(&sol, &inc)?;
                out.push(CheckResult::new("energy_sign", order, v, Criterion::AtMost(tol::ENERGY_SIGN)));
            }
            CheckKind::Radiation => {
                let sol = self.asm.solve_incident(&self.plane()?)?;
                let grid = DirectionGrid::new(PATTERN_GRID)?;
                let pat = checks::solution_pattern(&sol, grid, PatternMeta::default())?;
                out.push(CheckResult::new("farfield_tangential", order, pat.radial_defect(), Criterion::AtMost(tol::FARFIELD_TANGENTIAL)));
                let xhat = vec3::normalize([0.3, -0.5, 0.8]);
                let rad = checks::check_radiation_asymptotics(&sol, xhat, &[50.0, 100.0, 200.0])?;
                let (lo, hi) = tol::RADIATION_RATIO;
                for (i, r) in rad.ratios().iter().enumerate() {
                    out.push(CheckResult::new(format!("radiation_ratio_{}", i + 1), order, *r, Criterion::Within(lo, hi)).with_note(format!("e={:.3e}", rad.errors[i + 1])));
                }
                let sm = &rad.silver_muller;
                let decay = sm.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                out.push(CheckResult::new("silver_muller_decay", order, decay, Criterion::AtMost(hi)).with_note(format!("largest={:.3e}", sm[0])));
            }
            CheckKind::Equivariance => {
                let grid = DirectionGrid::new(6)?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed + 2);
                let (mut bie, mut oracle): (f64, f64) = (0.0, 0.0);
                for _ in 0..5 {
                    let rot = random_rotation(&mut rng);
                    bie = bie.max(checks::check_rotation_equivariance(&self.asm, &rot, self.d, self.q, &grid)?);
                    if MieScene::from_scene(self.scene).is_ok() {
                        oracle = oracle.max(checks::check_oracle_equivariance(self.scene, &rot, self.d, self.q, &grid)?);
                    }
                }
                out.push(CheckResult::new("equivariance_bie", order, bie, Criterion::AtMost(tol::EQUIVARIANCE_BIE)).with_note("5 seeded rotations"));
                if MieScene::from_scene(self.scene).is_ok() {
                    out.push(CheckResult::new("equivariance_oracle", order, oracle, Criterion::AtMost(tol::EQUIVARIANCE_ORACLE)));
                }
            }
            CheckKind::Oracle => {
                let grid = DirectionGrid::new(PATTERN_GRID)?;
                let sol = self.asm.solve_incident(&self.plane()?)?;
                let a = checks::solution_pattern(&sol, grid.clone(), PatternMeta::default())?;
                let b = checks::oracle_pattern(self.scene, self.d, self.q, grid, PatternMeta::default())?;
                out.push(CheckResult::new("oracle_farfield", order, farfield_distance(&a, &b)?, Criterion::AtMost(tol::MIE_FARFIELD)));
            }
            CheckKind::SingleSurface => {
                let grid = DirectionGrid::new(PATTERN_GRID)?;
                let r = checks::check_single_surface(&self.asm, self.d, self.q, &grid)?;
                out.push(CheckResult::new("single_surface", order, r, Criterion::AtMost(tol::SINGLE_SURFACE)));
            }
            CheckKind::Discrimination => {
                let floor = match self.reciprocity_floor {
                    Some(f) => f,
                    None => self.reciprocity(&mut Vec::new())?,
                };
                let other = Assembly::new(enlarged_obstacle(self.scene).discretize()?, Options::default())?;
                let grid = DirectionGrid::new(PATTERN_GRID)?;
                let dist = checks::check_discrimination(&self.asm, &other, self.d, self.q, &grid)?;
                let mut note = format!("reciprocity_floor={floor:.3e}");
                if self.scene.media.k1.im <= 0.0 {
                    note.push_str(" outside proven regime (real k1)");
                }
                let ratio = if floor > 0.0 { dist / floor } else { f64::INFINITY };
                out.push(CheckResult::new("discrimination", order, ratio, Criterion::AtLeast(tol::DISCRIMINATION_FACTOR)).with_note(format!("distance={dist:.3e} {note}")));
            }
        }
        Ok(out)
    }
}

/// Runs the selected checks (all applicable ones when `kinds` is `None`).
pub fn run_checks(scene: &Scene<f64>, kinds: Option<&[CheckKind]>, seed: u64) -> Result<VerificationReport, Error> {
    let selected: Vec<CheckKind> = match kinds {
        Some(k) => k.to_vec(),
        None => CheckKind::ALL.into_iter().filter(|k| k.applies_to(scene)).collect(),
    };
    let asm = Assembly::new(scene.discretize()?, Options::default())?;
    let (d, q) = seeded_plane_wave(seed);
    let mut ctx = Ctx { scene, asm, seed, d, q, reciprocity_floor: None };
    let mut report = VerificationReport { scene_hash: scene_hash(scene), seed, checks: Vec::new() };
    for kind in selected {
        let t = Instant::now();
        let mut results = match ctx.run(kind) {
            Ok(r) => r,
            Err(e) => vec![CheckResult::failed(kind.name(), scene.order, e.to_string())],
        };
        let secs = t.elapsed().as_secs_f64() / results.len().max(1) as f64;
        for r in &mut results {
            r.seconds = secs;
        }
        report.checks.extend(results);
    }
    Ok(report)
}

/// One line of a convergence study.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub order: usize,
    pub unknowns: usize,
    pub boundary_residual: f64,
    pub reciprocity: f64,
    /// Distance to the series solution, or to the finest order when no series exists.
    pub farfield_error: f64,
    pub reference: &'static str,
    pub seconds: f64,
}

impl fmt::Display for ConvergenceRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:>5} {:>8} {:>12.3e} {:>12.3e} {:>12.3e} {:>8} {:>8.1}",
            self.order, self.unknowns, self.boundary_residual, self.reciprocity, self.farfield_error, self.reference, self.seconds
        )
    }
}

pub const CONVERGENCE_HEADER: &str = "order unknowns     residual  reciprocity     farfield      ref     time";

/// Residuals and far-field errors of `scene` at each quadrature order.
pub fn convergence_table(scene: &Scene<f64>, orders: &[usize], seed: u64) -> Result<Vec<ConvergenceRow>, Error> {
    let (d, q) = seeded_plane_wave(seed);
    let inc = Incident::plane_wave(d, q)?;
    let grid = DirectionGrid::new(PATTERN_GRID)?;
    let oracle = checks::oracle_pattern(scene, d, q, grid.clone(), PatternMeta::default()).ok();
    let mut rows = Vec::new();
    let mut patterns = Vec::new();
    for &order in orders {
        let t = Instant::now();
        let s = scene.with_order(order);
        let asm = Assembly::new(s.discretize()?, Options::default())?;
        let sol = asm.solve_incident(&inc)?;
        let res = sol.boundary_residuals(&inc, order + 1)?.max();
        let rec = [Layer::Outer, Layer::Inner]
            .into_iter()
            .map(|l| checks::seeded_reciprocity(&asm, l, seed + 1).map(|r| r.residual()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        patterns.push(checks::solution_pattern(&sol, grid.clone(), PatternMeta::default())?);
        rows.push(ConvergenceRow {
            order,
            unknowns: asm.info.unknowns,
            boundary_residual: res,
            reciprocity: rec,
            farfield_error: f64::NAN,
            reference: "oracle",
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    let finest = orders.iter().enumerate().max_by_key(|(_, o)| **o).map(|(i, _)| i);
    for (i, row) in rows.iter_mut().enumerate() {
        match (&oracle, finest) {
            (Some(o), _) => row.farfield_error = farfield_distance(&patterns[i], o)?,
            (None, Some(f)) => {
                row.farfield_error = farfield_distance(&patterns[i], &patterns[f])?;
                row.reference = "finest";
            }
            _ => {}
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bie::tests::{concentric, layered};
    use crate::media::Partition;

    #[test]
    fn check_names_parse() {
        for k in CheckKind::ALL {
            assert_eq!(k.name().parse::<CheckKind>().unwrap(), k);
        }
        assert!("bogus".parse::<CheckKind>().is_err());
    }

    #[test]
    fn suite_is_deterministic_and_passes_on_a_small_scene() {
        let scene = concentric(2.0, 1.0, layered(C::new(1.4, 0.0), 1.0), Partition::all_impedance(1.0), 12);
        let kinds = [CheckKind::Uniqueness, CheckKind::Reciprocity, CheckKind::Energy, CheckKind::Oracle];
        let a = run_checks(&scene, Some(&kinds), 3).unwrap();
        let b = run_checks(&scene, Some(&kinds), 3).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        // the layer identity is only resolved to about 1e-1 at order 12
        assert!(a.checks.iter().all(|c| c.pass || c.name == "reciprocity_layer"), "{a}");
    }

    #[test]
    fn inapplicable_check_fails_with_a_note() {
        let scene = concentric(2.0, 1.0, layered(C::new(1.4, 0.0), 1.0), Partition::all_pec(), 8);
        let r = run_checks(&scene, Some(&[CheckKind::SingleSurface]), 0).unwrap();
        assert!(!r.passed());
        assert!(!r.checks[0].note.is_empty());
    }
}
