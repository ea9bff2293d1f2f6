//! Reproduction suite: one function per acceptance criterion, tolerances
//! pinned below.

use crate::artifacts::{Artifacts, Csv};
use crate::commands::{spectral_symmetry_defect, steer_case, SteerCase};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::row;
use dirac_moire::bulkspectra::{bulk_gap, numeric_gap};
use dirac_moire::dynamics::SteerRun;
use dirac_moire::fourier::{edge_band_structure, AssembledOperator, EdgeConfig, SpectralDecomposition};
use dirac_moire::invariants::{bulk_difference_invariant, half_invariant, half_invariant_reference, predicted_w};
use dirac_moire::model::{
    DiracJunction, EffectivePotential, ModelParams, PotentialBump, Stacking, ValleyKind,
};
use dirac_moire::scatter1d::{
    closed_form_barrier, even_split_formula, numeric_smatrix, position_sweep, split_conductivities,
};
use dirac_moire::transport::{
    conductivity, junction_decomposition, junction_values, make_filter, valley_pair, DensityWeight, FilterSpec,
    ValleyRun,
};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Published junction values by cutoff, rows `x0 = 3Lx/8, Lx/2, 5Lx/8`.
pub const TABLE: [(usize, [f64; 3]); 4] = [
    (8, [0.36144, 0.53574, 0.05648]),
    (16, [0.92310, 0.72033, 0.88647]),
    (32, [0.99923, 0.99612, 0.99901]),
    (64, [0.99983, 0.99997, 0.99993]),
];
pub const TABLE_TOL_COARSE: f64 = 0.15;
pub const TABLE_TOL_FINE: f64 = 0.01;
pub const TABLE_CELL_SECONDS: f64 = 600.0;

pub const W_RESIDUAL: f64 = 1e-2;
pub const W_SYMMETRY: f64 = 2e-2;
pub const W_SECONDS: f64 = 120.0;
pub const HALF_PLUS_4: f64 = 0.49752;
pub const HALF_PLUS_3: f64 = -1.49752;
pub const HALF_TOL: f64 = 1e-2;
pub const GLUE_TOL: f64 = 2e-2;
pub const GAP_TOL: f64 = 1e-8;
pub const GAP_SAMPLES: usize = 20;
pub const EDGE_SYMMETRY: f64 = 1e-8;
pub const VALLEY_DECOUPLED: f64 = 0.02;
pub const VALLEY_DIP: f64 = 0.10;
pub const VALLEY_SUM: f64 = 1e-8;
pub const SCATTER_CLOSED: f64 = 1e-8;
pub const SCATTER_UNITARY: f64 = 1e-10;
pub const SCATTER_OUTSIDE: f64 = 1e-12;
pub const SCATTER_RESONANCE: f64 = 1e-10;
pub const SCATTER_EVEN: f64 = 1e-10;
pub const PACKET_DRIFT: f64 = 1e-10;
pub const PACKET_MIN_WEIGHT: f64 = 0.05;
pub const STEER_SIGMA: f64 = 1e-2;
pub const STEER_WEIGHT: f64 = 0.2;
pub const STABLE_FILTER: f64 = 5e-3;
pub const STABLE_PHI: f64 = 5e-3;
pub const STABLE_BUMP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
    /// Wall-clock checks stay out of the CSV, which must be reproducible.
    pub timing: bool,
}

fn near(name: impl Into<String>, v: f64, target: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        value: v,
        bound: format!("{target} ± {tol:e}"),
        pass: (v - target).abs() <= tol,
        timing: false,
    }
}

fn below(name: impl Into<String>, v: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        value: v,
        bound: format!("< {tol:e}"),
        pass: v < tol,
        timing: false,
    }
}

fn above(name: impl Into<String>, v: f64, thr: f64) -> Check {
    Check {
        name: name.into(),
        value: v,
        bound: format!("> {thr}"),
        pass: v > thr,
        timing: false,
    }
}

fn timing(name: impl Into<String>, secs: f64, limit: f64) -> Check {
    Check {
        timing: true,
        ..below(name, secs, limit)
    }
}

fn equal(name: impl Into<String>, v: f64, want: f64) -> Check {
    Check {
        name: name.into(),
        value: v,
        bound: format!("= {want}"),
        pass: v == want,
        timing: false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub checks: Vec<Check>,
    pub note: String,
    pub seconds: f64,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str, checks: Vec<Check>, note: String) -> Self {
        let status = if checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            id,
            title,
            status,
            checks,
            note,
            seconds: 0.0,
        }
    }

    fn skipped(id: u8, title: &'static str, why: &str) -> Self {
        Self {
            id,
            title,
            status: Status::Skip,
            checks: vec![],
            note: why.to_string(),
            seconds: 0.0,
        }
    }

    fn errored(id: u8, e: &CliError) -> Self {
        Self {
            id,
            title: TITLES[id as usize - 1],
            status: Status::Fail,
            checks: vec![],
            note: format!("error: {e}"),
            seconds: 0.0,
        }
    }

    /// One line per criterion: status, title, then each check.
    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {:>2}: {}  {} ({:.1}s)",
            self.id,
            self.status.label(),
            self.title,
            self.seconds
        );
        for c in &self.checks {
            s.push_str(&format!(
                "\n    [{}] {} = {:.6e} (want {})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            ));
        }
        if !self.note.is_empty() {
            s.push_str(&format!("\n    note: {}", self.note));
        }
        s
    }
}

const TITLES: [&str; 10] = [
    "junction table at N=16 and N=32",
    "bulk-difference invariant and sign symmetries",
    "half invariants and gluing",
    "bulk spectral gap",
    "edge spectrum",
    "valley conductivity",
    "1D scattering",
    "wavepacket propagation and steering",
    "stability of the junction conductivity",
    "results out of desk scale",
];

pub struct Suite<'a> {
    cfg: &'a ExperimentConfig,
    fine: Option<(AssembledOperator, SpectralDecomposition)>,
}

impl<'a> Suite<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        Self { cfg, fine: None }
    }

    fn x0_rows(&self) -> [f64; 3] {
        let lx = self.cfg.junction.lx;
        [3.0 * lx / 8.0, lx / 2.0, 5.0 * lx / 8.0]
    }

    fn fine(&mut self) -> Result<&(AssembledOperator, SpectralDecomposition), CliError> {
        if self.fine.is_none() {
            let d = junction_decomposition(&self.cfg.junction, self.cfg.suite.n_fine, &self.cfg.junction_run)?;
            self.fine = Some(d);
        }
        Ok(self.fine.as_ref().unwrap())
    }

    pub fn run(&mut self, id: u8) -> CriterionReport {
        let quick = self.cfg.suite.quick;
        let title = TITLES[id as usize - 1];
        let t = Instant::now();
        let r = match id {
            1 | 8 | 9 if quick => Ok(CriterionReport::skipped(id, title, "quick mode")),
            1 => self.table(),
            2 => self.invariant(),
            3 => self.halves(),
            4 => self.gap(),
            5 => self.edge(),
            6 => self.valley(),
            7 => self.scatter(),
            8 => self.packets(),
            9 => self.stability(),
            _ => Ok(CriterionReport::skipped(
                10,
                title,
                "N=64 table column and exact valley maps are optional; run junction_table with table.max_n=64",
            )),
        };
        let mut rep = r.unwrap_or_else(|e| CriterionReport::errored(id, &e));
        rep.seconds = t.elapsed().as_secs_f64();
        rep
    }

    fn table(&mut self) -> Result<CriterionReport, CliError> {
        let s = &self.cfg.suite;
        let rows = self.x0_rows();
        let mut checks = vec![];
        let mut note = String::new();
        for n in [s.n_coarse, s.n_fine] {
            let t = Instant::now();
            let jr = &self.cfg.junction_run;
            let vals = if n == s.n_fine {
                let (op, sd) = self.fine()?;
                junction_values(op, sd, &rows, jr)?
            } else {
                let (op, sd) = junction_decomposition(&self.cfg.junction, n, &self.cfg.junction_run)?;
                junction_values(&op, &sd, &rows, &self.cfg.junction_run)?
            };
            let secs = t.elapsed().as_secs_f64();
            let tol = if n >= 32 { TABLE_TOL_FINE } else { TABLE_TOL_COARSE };
            match TABLE.iter().find(|(m, _)| *m == n) {
                Some((_, target)) => {
                    for ((x0, v), want) in rows.iter().zip(&vals).zip(target) {
                        checks.push(near(format!("N={n} x0={x0}"), *v, *want, tol));
                    }
                }
                None => note.push_str(&format!("N={n} has no published column: {vals:?}; ")),
            }
            if n == s.n_fine {
                checks.push(timing(format!("N={n} seconds per cell"), secs / rows.len() as f64, TABLE_CELL_SECONDS));
            }
        }
        Ok(CriterionReport::new(1, TITLES[0], checks, note))
    }

    fn invariant(&mut self) -> Result<CriterionReport, CliError> {
        let c = self.cfg;
        let p = ModelParams::new(1.0, 0.2, 1, Stacking::Plus)?;
        let (r, n) = (c.invariant.radius, c.suite.invariant_n);
        let t = Instant::now();
        let bd = bulk_difference_invariant(&p, r, n)?;
        let secs = t.elapsed().as_secs_f64();
        let mut checks = vec![
            equal("nearest_int", bd.nearest_int as f64, predicted_w(&p) as f64),
            below("residual", bd.residual, W_RESIDUAL),
            timing("seconds", secs, W_SECONDS),
            near("W(Ω,λ,η)", bd.w, -2.0, W_SYMMETRY),
        ];
        for (name, q, sign) in [
            ("−W(−Ω,λ,η)", ModelParams::new(-1.0, 0.2, 1, Stacking::Plus)?, -1.0),
            ("W(Ω,−λ,η)", ModelParams::new(1.0, -0.2, 1, Stacking::Plus)?, 1.0),
            ("−W(Ω,λ,−η)", ModelParams::new(1.0, 0.2, -1, Stacking::Plus)?, -1.0),
        ] {
            let w = bulk_difference_invariant(&q, r, n)?.w;
            checks.push(near(name, sign * w, bd.w, W_SYMMETRY));
        }
        Ok(CriterionReport::new(2, TITLES[1], checks, format!("R={r} n={n}")))
    }

    fn halves(&mut self) -> Result<CriterionReport, CliError> {
        let c = self.cfg;
        let (r, n) = (c.invariant.radius, c.suite.invariant_n);
        let plus = ModelParams::plus(1.0, 0.2);
        let minus = plus.with_stacking(Stacking::Minus);
        let h = |q: &ModelParams, b: usize| half_invariant(q, &[b], r, n).map(|h| h.value);
        let (p4, p3, m4, m3) = (h(&plus, 4)?, h(&plus, 3)?, h(&minus, 4)?, h(&minus, 3)?);
        let checks = vec![
            near("W+^4", p4, HALF_PLUS_4, HALF_TOL),
            near("W+^3", p3, HALF_PLUS_3, HALF_TOL),
            near("W+^4 − W−^3", p4 - m3, -1.0, GLUE_TOL),
            near("W+^3 − W−^4", p3 - m4, 1.0, GLUE_TOL),
        ];
        let (c4, c3) = (half_invariant_reference(&plus, &[4]), half_invariant_reference(&plus, &[3]));
        let (d4, d3) = (half_invariant_reference(&minus, &[4]), half_invariant_reference(&minus, &[3]));
        let note = format!(
            "closed forms give W+^4 − W−^3 = {:.6} and W+^3 − W−^4 = {:.6}; the two sums add up to W = W+ − W−",
            c4 - d3,
            c3 - d4
        );
        Ok(CriterionReport::new(3, TITLES[2], checks, note))
    }

    fn gap(&mut self) -> Result<CriterionReport, CliError> {
        let g = &self.cfg.gapscan;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut worst = 0.0f64;
        for _ in 0..GAP_SAMPLES {
            let om = rng.random_range(g.omega[0]..=g.omega[1]);
            let la = rng.random_range(g.lambda[0]..=g.lambda[1]);
            let p = ModelParams::plus(om, la);
            let exact = (om * la).abs() / (4.0 * om * om + la * la).sqrt();
            worst = worst.max((numeric_gap(&p, g.rmax, g.n).0 - exact).abs());
            // the library closed form must agree with the same expression
            worst = worst.max((bulk_gap(&p)?.0 - exact).abs());
        }
        let checks = vec![below(format!("max |E3 min − |Ωλ|/√(4Ω²+λ²)| over {GAP_SAMPLES}"), worst, GAP_TOL)];
        Ok(CriterionReport::new(4, TITLES[3], checks, String::new()))
    }

    fn edge(&mut self) -> Result<CriterionReport, CliError> {
        let p = ModelParams::plus(1.0, 0.2);
        let cfg = EdgeConfig::default();
        let xs = crate::commands::linspace(-2.0, 2.0, self.cfg.suite.edge_points);
        let b = edge_band_structure(&p, &xs, &cfg)?;
        let phys = b.selected_crossings();
        let art = b.artifact_crossings();
        let pos = |l: &[dirac_moire::fourier::EdgeCrossing]| l.iter().filter(|c| c.slope > 0.0).count();
        let checks = vec![
            equal("selected gap crossings", phys.len() as f64, 2.0),
            equal("selected crossings with dE/dξ1 > 0", pos(&phys) as f64, 2.0),
            below(
                "max |E(ξ1) + E(−ξ1)| multiset",
                spectral_symmetry_defect(&b).unwrap_or(f64::INFINITY),
                EDGE_SYMMETRY,
            ),
        ];
        let note = format!(
            "physical wall slopes {:?}; mirrored wall has {} crossings, {} with positive slope",
            phys.iter().map(|c| c.slope).collect::<Vec<_>>(),
            art.len(),
            pos(&art)
        );
        Ok(CriterionReport::new(5, TITLES[4], checks, note))
    }

    fn valley(&mut self) -> Result<CriterionReport, CliError> {
        let run = ValleyRun {
            kx: self.cfg.suite.valley_kx,
            ..ValleyRun::default()
        };
        let chi = EffectivePotential::default_chi();
        let two = |v0: f64, omega: f64| EffectivePotential::TwoScale {
            v0,
            omega,
            eps: 1.0,
            chi,
        };
        let (d_p, d_m) = valley_pair(ValleyKind::H2eps, two(0.0, 2.0), &run)?;
        let (a_p, a_m) = valley_pair(ValleyKind::H2eps, two(0.1, 0.5), &run)?;
        let (b_p, b_m) = valley_pair(ValleyKind::H2eps, two(0.1, 2.0), &run)?;
        let sum = [d_p + d_m, a_p + a_m, b_p + b_m]
            .iter()
            .fold(0.0f64, |m, s| m.max(s.abs()));
        let checks = vec![
            near("decoupled σ+", d_p, 1.0, VALLEY_DECOUPLED),
            near("decoupled σ−", d_m, -1.0, VALLEY_DECOUPLED),
            above("relative dip 1 − σ+(ω=2)/σ+(ω=0.5)", 1.0 - b_p / a_p, VALLEY_DIP),
            below("max |σ+ + σ−|", sum, VALLEY_SUM),
        ];
        let note = format!("σ+(ω=0.5)={a_p:.5} σ+(ω=2)={b_p:.5}");
        Ok(CriterionReport::new(6, TITLES[5], checks, note))
    }

    fn scatter(&mut self) -> Result<CriterionReport, CliError> {
        let (v0, a, k) = (0.5, 1.0, 1.0);
        let cells = |v: f64, n: usize| vec![v; n];
        let s = numeric_smatrix(&cells(v0, 64), -a, a, k)?;
        let closed = (s.r_minus - closed_form_barrier(v0, a, k)?).norm();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut unit = s.unitarity_defect();
        for _ in 0..20 {
            let c: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..3.0)).collect();
            let kk = rng.random_range(0.2..2.5);
            unit = unit.max(numeric_smatrix(&c, -3.0, 4.0, kk)?.unitarity_defect());
        }

        let v = move |x: f64| if x.abs() < a { v0 } else { 0.0 };
        let outside = position_sweep(&v, -a, a, k, &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0], 100.0)?
            .iter()
            .fold(0.0f64, |m, p| m.max((p.split.sigma_plus - 1.0).abs()));

        let mut resonance = 0.0f64;
        for n in 1..=3 {
            // 2qa = nπ with q² = k² − V0
            let q = n as f64 * PI / (2.0 * a);
            let kr = (q * q + v0).sqrt();
            resonance = resonance.max(numeric_smatrix(&cells(v0, 16), -a, a, kr)?.r_minus.norm());
        }

        let sl = numeric_smatrix(&cells(v0, 32), -a, 0.0, k)?;
        let sr = numeric_smatrix(&cells(v0, 32), 0.0, a, k)?;
        let even = (split_conductivities(&sl, &sr)?.sigma_plus - even_split_formula(sl.r_minus)).abs();

        let checks = vec![
            below("|R − closed form|", closed, SCATTER_CLOSED),
            below("max |SS* − I|", unit, SCATTER_UNITARY),
            below("max |σ+ − 1| outside supp V", outside, SCATTER_OUTSIDE),
            below("max |R| at 2qa = nπ, n=1..3", resonance, SCATTER_RESONANCE),
            below("|σ+(0) − (1−r⁴)/|1−e^{2iθ}r²|²|", even, SCATTER_EVEN),
        ];
        Ok(CriterionReport::new(7, TITLES[6], checks, String::new()))
    }

    fn packets(&mut self) -> Result<CriterionReport, CliError> {
        let c = self.cfg;
        let run = SteerRun {
            n: c.suite.n_packet,
            t: 50.0,
            packet: c.packet.packet,
            branches: c.packet.branches,
            solver: c.junction_run.solver.clone(),
        };
        let x0 = Some(0.5 * c.junction.lx);
        let times: Vec<f64> = (0..=5).map(|i| 10.0 * i as f64).collect();
        let case = |th: Option<f64>| -> Result<SteerCase, CliError> {
            steer_case(&c.junction, th, &run, &c.junction_run, x0, &times)
        };
        let sym = case(None)?;
        let out = [0.0, 120.0, 240.0];
        let w = |s: &SteerCase, a: f64| s.last.weight_at(a);
        let mut checks = vec![];
        let mut drift = (sym.norm_drift, sym.energy_drift);
        let min_out = out.iter().map(|&a| w(&sym, a)).fold(f64::INFINITY, f64::min);
        checks.push(above("symmetric: min outgoing weight", min_out, PACKET_MIN_WEIGHT));
        checks.push(equal(
            "symmetric: straight-through is smallest (1 = yes)",
            (w(&sym, 0.0) <= min_out) as u8 as f64,
            1.0,
        ));
        let (mut dsig, mut dw_min) = (0.0f64, f64::INFINITY);
        let mut note = format!(
            "symmetric weights 0°:{:.3} 120°:{:.3} 240°:{:.3};",
            w(&sym, 0.0),
            w(&sym, 120.0),
            w(&sym, 240.0)
        );
        for (th, want) in [(2.0 * PI / 3.0, 120.0), (0.0, 0.0), (-2.0 * PI / 3.0, 240.0)] {
            let s = case(Some(th))?;
            drift.0 = drift.0.max(s.norm_drift);
            drift.1 = drift.1.max(s.energy_drift);
            checks.push(equal(format!("θm={th:.4}: dominant branch (deg)"), s.last.dominant(&out), want));
            dsig = dsig.max((s.sigma.unwrap_or(f64::NAN) - sym.sigma.unwrap_or(f64::NAN)).abs());
            let dw = out.iter().map(|&a| (w(&s, a) - w(&sym, a)).abs()).fold(0.0, f64::max);
            dw_min = dw_min.min(dw);
            note.push_str(&format!(" θm={th:.3}→{:.3} at {want}°;", w(&s, want)));
        }
        checks.insert(0, below("max norm drift", drift.0, PACKET_DRIFT));
        checks.insert(1, below("max energy drift", drift.1, PACKET_DRIFT));
        checks.push(below("max |Δ2πσ̃| under steering", dsig, STEER_SIGMA));
        checks.push(above("min over θm of max |Δweight|", dw_min, STEER_WEIGHT));
        note.push_str(&format!(" N={}", run.n));
        Ok(CriterionReport::new(8, TITLES[7], checks, note))
    }

    fn stability(&mut self) -> Result<CriterionReport, CliError> {
        let c = self.cfg;
        let jr = &c.junction_run;
        let lx = c.junction.lx;
        let (op, sd) = self.fine()?;
        let sigma = |p: FilterSpec, q: FilterSpec, e0: f64| -> Result<f64, CliError> {
            let p = make_filter(&p, &op.grid)?;
            let q = make_filter(&q, &op.grid)?;
            Ok(conductivity(sd, op, &p, &q, &DensityWeight::new(e0)?)?.two_pi_sigma)
        };
        let base = sigma(FilterSpec::junction(0.5 * lx, jr.delta), FilterSpec::mask_q(jr.delta), jr.e0)?;
        let alt = sigma(FilterSpec::junction(0.45 * lx, 1.5 * jr.delta), FilterSpec::mask_q(1.5 * jr.delta), jr.e0)?;
        let phi = sigma(FilterSpec::junction(0.5 * lx, jr.delta), FilterSpec::mask_q(jr.delta), 0.6)?;
        let bumped = DiracJunction {
            potential: Some(PotentialBump::default()),
            ..c.junction.clone()
        };
        let (bop, bsd) = junction_decomposition(&bumped, c.suite.n_fine, jr)?;
        let bump = junction_values(&bop, &bsd, &[0.5 * lx], &jr)?[0];
        let checks = vec![
            below("|Δ| other filter (x0=0.45Lx, δ×1.5)", (alt - base).abs(), STABLE_FILTER),
            below("|Δ| φ' half-width 0.6", (phi - base).abs(), STABLE_PHI),
            below("|Δ| compact potential bump", (bump - base).abs(), STABLE_BUMP),
        ];
        let note = format!("N={} base {base:.5} filter {alt:.5} phi {phi:.5} bump {bump:.5}", c.suite.n_fine);
        Ok(CriterionReport::new(9, TITLES[8], checks, note))
    }
}

/// Runs the selected criteria in order, calling `each` as soon as one is done.
pub fn run_suite(cfg: &ExperimentConfig, mut each: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    let ids: Vec<u8> = if cfg.suite.only.is_empty() {
        (1..=10).collect()
    } else {
        cfg.suite.only.clone()
    };
    let mut suite = Suite::new(cfg);
    ids.into_iter()
        .map(|id| {
            let r = suite.run(id);
            each(&r);
            r
        })
        .collect()
}

pub fn summary_csv(reports: &[CriterionReport], art: &mut Artifacts) {
    let mut csv = Csv::new(&["criterion", "status", "check", "value", "bound", "pass"]);
    for r in reports {
        if r.checks.is_empty() {
            csv.row(row![r.id as usize, r.status.label(), "", f64::NAN, "", r.status != Status::Fail]);
        }
        for c in r.checks.iter().filter(|c| !c.timing) {
            csv.row(row![r.id as usize, r.status.label(), csv_text(&c.name).as_str(), c.value, csv_text(&c.bound).as_str(), c.pass]);
        }
    }
    art.csv("criteria.csv", csv);
}

fn csv_text(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
