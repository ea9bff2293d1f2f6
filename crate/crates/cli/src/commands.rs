//! One function per subcommand. Each returns its artifacts and results
//! without touching the filesystem.

use crate::artifacts::{Artifacts, Csv};
use crate::config::{ExperimentConfig, ValleyMode};
use crate::error::CliError;
use crate::row;
use dirac_moire::arrayio::FlatArray;
use dirac_moire::bulkspectra::{bulk_eigenvalues, bulk_gap, numeric_gap};
use dirac_moire::dynamics::{
    branch_weights, edge_packet, expectation, junction_setup, propagate, BranchWeights, SteerRun, Wavepacket,
};
use dirac_moire::fourier::{edge_band_structure, EdgeBands, EdgeCrossing, SolverStats};
use dirac_moire::invariants::{
    bulk_difference_invariant, curvature_map, half_invariant, half_invariant_reference, predicted_w,
};
use dirac_moire::model::{DiracJunction, ModelParams, Stacking, ValleyKind};
use dirac_moire::scatter1d::{closed_form_barrier, position_sweep};
use dirac_moire::transport::{
    conductivity, dirac_conductivity_oracle, energy_sweep, junction_decomposition, junction_values, make_filter,
    valley_pair, DensityWeight, FilterSpec, JunctionRun,
};
use rand::{Rng, SeedableRng};
use serde_json::{json, Map, Value};

#[derive(Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub stats: Vec<SolverStats>,
    pub artifacts: Artifacts,
    /// Tolerance checks that did not hold; artifacts are still written.
    pub failures: Vec<String>,
}

impl Outcome {
    fn set(&mut self, key: &str, v: impl serde::Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn require(&mut self, ok: bool, what: String) {
        if !ok {
            self.failures.push(what);
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn array(shape: Vec<usize>, data: Vec<f64>) -> Result<FlatArray, CliError> {
    FlatArray::real(shape, data).map_err(|e| CliError::Solver(e.to_string()))
}

pub fn bandstructure(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = c.model.params()?;
    let b = &c.bandstructure;
    let xs = linspace(-b.xi_max, b.xi_max, b.points);
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["xi1", "xi2", "band", "energy"]);
    let mut flat = Vec::with_capacity(4 * xs.len());
    let mut min_abs = f64::INFINITY;
    for &x in &xs {
        let ev = bulk_eigenvalues(&p, x, 0.0);
        for (band, e) in ev.iter().enumerate() {
            csv.row(row![x, 0.0, band + 1, *e]);
            min_abs = min_abs.min(e.abs());
        }
        flat.extend_from_slice(&ev);
    }
    out.artifacts.csv("bands.csv", csv);
    out.artifacts.array("bands.dmar", &array(vec![xs.len(), 4], flat)?);
    out.set("min_abs_energy_on_path", min_abs);
    out.set("gap", bulk_gap(&p).ok().map(|g| json!({"e_min": g.0, "xi_sq": g.1})));
    Ok(out)
}

pub fn gapscan(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let g = &c.gapscan;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed);
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["sample", "omega", "lambda", "numeric", "closed_form", "abs_err"]);
    let mut worst = 0.0f64;
    for i in 0..g.samples {
        let om = rng.random_range(g.omega[0]..=g.omega[1]);
        let la = rng.random_range(g.lambda[0]..=g.lambda[1]);
        let p = ModelParams::new(om, la, c.model.eta, c.model.stacking)?;
        let (num, _) = numeric_gap(&p, g.rmax, g.n);
        let (exact, _) = bulk_gap(&p)?;
        let err = (num - exact).abs();
        worst = worst.max(err);
        csv.row(row![i, om, la, num, exact, err]);
    }
    out.artifacts.csv("gapscan.csv", csv);
    out.set("max_abs_err", worst);
    out.require(worst <= g.tol, format!("gap error {worst:.3e} > {:.1e}", g.tol));
    Ok(out)
}

fn signed(p: &ModelParams, so: f64, sl: f64, eta: i32) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(so * p.omega, sl * p.lambda, eta, p.stacking)?)
}

pub fn invariant(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = c.model.params()?;
    let s = &c.invariant;
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["quantity", "omega", "lambda", "eta", "value", "reference"]);
    let bd = bulk_difference_invariant(&p, s.radius, s.n)?;
    let pred = predicted_w(&p);
    csv.row(row!["W", p.omega, p.lambda, p.eta as i64, bd.w, pred as f64]);
    csv.row(row!["W_plus", p.omega, p.lambda, p.eta as i64, bd.w_plus, f64::NAN]);
    csv.row(row!["W_minus", p.omega, p.lambda, p.eta as i64, bd.w_minus, f64::NAN]);
    out.set("w", bd.w);
    out.set("nearest_int", bd.nearest_int);
    out.set("residual", bd.residual);
    out.set("predicted", pred);
    out.require(bd.nearest_int == pred, format!("W rounds to {} instead of {pred}", bd.nearest_int));
    out.require(bd.residual < s.tol, format!("W residual {:.3e} >= {:.1e}", bd.residual, s.tol));

    if s.symmetries {
        // W(Ω,λ,η) = −W(−Ω,λ,η) = W(Ω,−λ,η) = −W(Ω,λ,−η)
        let mut rel = Map::new();
        for (name, so, sl, eta, sign) in [
            ("neg_omega", -1.0, 1.0, p.eta, -1.0),
            ("neg_lambda", 1.0, -1.0, p.eta, 1.0),
            ("neg_eta", 1.0, 1.0, -p.eta, -1.0),
        ] {
            let q = signed(&p, so, sl, eta)?;
            let w = bulk_difference_invariant(&q, s.radius, s.n)?.w;
            csv.row(row!["W", q.omega, q.lambda, q.eta as i64, w, predicted_w(&q) as f64]);
            let defect = (w - sign * bd.w).abs();
            rel.insert(name.into(), json!({"w": w, "relation_defect": defect}));
            out.require(defect < 2.0 * s.tol, format!("{name}: relation defect {defect:.3e}"));
        }
        out.set("symmetries", rel);
    }

    if s.halves {
        let plus = p.with_stacking(Stacking::Plus);
        let minus = p.with_stacking(Stacking::Minus);
        let mut h = Map::new();
        let mut vals = [0.0; 4];
        for (i, (name, q, band)) in [
            ("W_plus_4", &plus, 4usize),
            ("W_plus_3", &plus, 3),
            ("W_minus_4", &minus, 4),
            ("W_minus_3", &minus, 3),
        ]
        .into_iter()
        .enumerate()
        {
            let v = half_invariant(q, &[band], s.radius, s.n)?.value;
            let r = half_invariant_reference(q, &[band]);
            vals[i] = v;
            csv.row(row![name, q.omega, q.lambda, q.eta as i64, v, r]);
            h.insert(name.into(), json!({"value": v, "closed_form": r}));
        }
        h.insert("glue_4_3".into(), json!(vals[0] - vals[3]));
        h.insert("glue_3_4".into(), json!(vals[1] - vals[2]));
        out.set("halves", h);
    }
    out.artifacts.csv("invariant.csv", csv);

    if s.map_n > 0 {
        let f = curvature_map(&p, &[3, 4], s.map_radius, s.map_n)?;
        let mut m = Csv::new(&["xi1", "xi2", "curvature"]);
        for [x, y, v] in f.density_rows() {
            m.row(row![x, y, v]);
        }
        out.artifacts.csv("curvature.csv", m);
    }
    Ok(out)
}

/// Max deviation between the spectrum at `ξ1` and minus the spectrum at
/// `−ξ1`, over a grid symmetric about 0.
pub fn spectral_symmetry_defect(b: &EdgeBands) -> Option<f64> {
    let n = b.xi1.len();
    let symmetric = (0..n).all(|i| (b.xi1[i] + b.xi1[n - 1 - i]).abs() < 1e-12);
    if !symmetric {
        return None;
    }
    let mut d = 0.0f64;
    for i in 0..n {
        let a = &b.spectra[i];
        let mut m: Vec<f64> = b.spectra[n - 1 - i].iter().map(|e| -e).collect();
        m.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&m) {
            d = d.max((x - y).abs());
        }
    }
    Some(d)
}

pub fn edge_spectrum(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = c.model.params()?;
    let e = &c.edge;
    let xs = linspace(e.xi_min, e.xi_max, e.points);
    let b = edge_band_structure(&p, &xs, &e.strip)?;
    let mut out = Outcome::default();
    let mut lv = Csv::new(&["xi1", "energy", "weight", "slope"]);
    for (x, levels) in xs.iter().zip(&b.levels) {
        for l in levels {
            lv.row(row![*x, l.energy, l.weight, l.slope]);
        }
    }
    let mut cr = Csv::new(&["wall", "xi1", "slope"]);
    let phys = b.selected_crossings();
    let art = b.artifact_crossings();
    for (wall, list) in [("physical", &phys), ("artifact", &art)] {
        for x in list.iter() {
            cr.row(row![wall, x.xi1, x.slope]);
        }
    }
    let dim = b.spectra.first().map_or(0, Vec::len);
    let flat: Vec<f64> = b.spectra.iter().flatten().copied().collect();
    out.artifacts.csv("levels.csv", lv);
    out.artifacts.csv("crossings.csv", cr);
    out.artifacts.array("spectra.dmar", &array(vec![xs.len(), dim], flat)?);
    let summary = |l: &[EdgeCrossing]| {
        json!({
            "count": l.len(),
            "positive_slope": l.iter().filter(|c| c.slope > 0.0).count(),
            "xi1": l.iter().map(|c| c.xi1).collect::<Vec<_>>(),
        })
    };
    out.set("gap", b.gap);
    out.set("physical_wall", summary(&phys));
    out.set("artifact_wall", summary(&art));
    let defect = spectral_symmetry_defect(&b);
    out.set("spectral_symmetry_defect", defect);
    if let Some(d) = defect {
        out.require(d < 1e-8, format!("spectral symmetry defect {d:.3e}"));
    }
    Ok(out)
}

pub fn conductivity_run(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = &c.conductivity;
    let run = &c.junction_run;
    let (op, sd) = junction_decomposition(&c.junction, s.n, run)?;
    let w = DensityWeight::new(run.e0)?;
    let q = make_filter(&FilterSpec::mask_q(run.delta), &op.grid)?;
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["x0", "n", "two_pi_sigma", "two_pi_sigma_im", "oracle"]);
    let mut parts = Csv::new(&["x0", "energy", "weight", "element_re", "element_im"]);
    let mut vals = vec![];
    for &x0 in &s.x0 {
        let p = make_filter(&FilterSpec::junction(x0, run.delta), &op.grid)?;
        let r = conductivity(&sd, &op, &p, &q, &w)?;
        let oracle = if s.oracle {
            dirac_conductivity_oracle(&sd, &op, &p, &q, &w)?
        } else {
            f64::NAN
        };
        csv.row(row![x0, s.n, r.two_pi_sigma, r.two_pi_sigma_im, oracle]);
        for k in &r.contributions {
            parts.row(row![x0, k.energy, k.weight, k.element[0], k.element[1]]);
        }
        vals.push(json!({"x0": x0, "two_pi_sigma": r.two_pi_sigma, "oracle": s.oracle.then_some(oracle)}));
    }
    out.artifacts.csv("conductivity.csv", csv);
    out.artifacts.csv("contributions.csv", parts);
    out.set("values", vals);
    out.set("filter", json!({"delta": run.delta, "e0": run.e0}));
    out.stats.push(sd.stats.clone());
    Ok(out)
}

/// Table cells for every `n` up to `max_n`; larger cutoffs stay empty.
pub fn table_values(
    dj: &DiracJunction,
    x0: &[f64],
    n_list: &[usize],
    max_n: usize,
    run: &JunctionRun,
    stats: &mut Vec<SolverStats>,
) -> Result<Vec<Vec<Option<f64>>>, CliError> {
    let mut values = vec![vec![None; n_list.len()]; x0.len()];
    for (k, &n) in n_list.iter().enumerate() {
        if n > max_n {
            continue;
        }
        let (op, sd) = junction_decomposition(dj, n, run)?;
        for (i, v) in junction_values(&op, &sd, x0, run)?.into_iter().enumerate() {
            values[i][k] = Some(v);
        }
        stats.push(sd.stats.clone());
    }
    Ok(values)
}

pub fn junction_table(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let t = &c.table;
    let mut out = Outcome::default();
    let values = table_values(&c.junction, &t.x0, &t.n, t.max_n, &c.junction_run, &mut out.stats)?;
    let mut long = Csv::new(&["x0", "n", "two_pi_sigma"]);
    let header: Vec<String> = std::iter::once("x0".to_string())
        .chain(t.n.iter().map(|n| format!("N={n}")))
        .collect();
    let mut wide = String::from(header.join(","));
    wide.push('\n');
    for (i, &x0) in t.x0.iter().enumerate() {
        wide.push_str(&x0.to_string());
        for (k, &n) in t.n.iter().enumerate() {
            wide.push(',');
            if let Some(v) = values[i][k] {
                long.row(row![x0, n, v]);
                wide.push_str(&v.to_string());
            }
        }
        wide.push('\n');
    }
    out.artifacts.csv("junction_long.csv", long);
    out.artifacts.raw("table.csv", "csv", wide.into_bytes());
    out.set("x0", &t.x0);
    out.set("n", &t.n);
    out.set("skipped_n", t.n.iter().filter(|&&n| n > t.max_n).collect::<Vec<_>>());
    out.set("values", &values);
    Ok(out)
}

pub fn valley_sweep(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let v = &c.valley;
    let mut out = Outcome::default();
    match v.mode {
        ValleyMode::Omega => {
            let mut csv = Csv::new(&["v0", "omega", "x0", "sigma_plus", "sigma_minus", "sum"]);
            let mut worst = 0.0f64;
            for &v0 in &v.v0 {
                for &om in &v.omega {
                    for &x0 in &v.x0 {
                        let run = dirac_moire::transport::ValleyRun { x0, ..v.run.clone() };
                        let (sp, sm) = valley_pair(v.kind, v.potential(v.kind, v0, om), &run)?;
                        worst = worst.max((sp + sm).abs());
                        csv.row(row![v0, om, x0, sp, sm, sp + sm]);
                    }
                }
            }
            out.artifacts.csv("valley.csv", csv);
            out.set("max_abs_sum", worst);
            out.require(worst < 1e-8, format!("valley sum rule violated by {worst:.3e}"));
        }
        ValleyMode::Energy => {
            let mut csv = Csv::new(&["kind", "v0", "energy", "x0", "sigma_plus"]);
            let kind = match v.kind {
                ValleyKind::H2 => "h2",
                _ => "h4",
            };
            let mut grid = vec![];
            for &x0 in &v.x0 {
                let run = dirac_moire::transport::ValleyRun { x0, ..v.run.clone() };
                let g = energy_sweep(v.kind, |v0| v.potential(v.kind, v0, 0.0), &v.v0, &v.energy, &run)?;
                for (i, row_) in g.iter().enumerate() {
                    for (j, s) in row_.iter().enumerate() {
                        csv.row(row![kind, v.v0[i], v.energy[j], x0, *s]);
                    }
                }
                let flat: Vec<f64> = g.iter().flatten().copied().collect();
                grid.push(flat);
            }
            out.artifacts.csv("valley_energy.csv", csv);
            let flat: Vec<f64> = grid.into_iter().flatten().collect();
            out.artifacts.array(
                "valley_energy.dmar",
                &array(vec![v.x0.len(), v.v0.len(), v.energy.len()], flat)?,
            );
        }
    }
    Ok(out)
}

fn steer_run(c: &ExperimentConfig) -> SteerRun {
    let p = &c.packet;
    SteerRun {
        n: p.n,
        t: p.times.iter().cloned().fold(0.0, f64::max),
        packet: p.packet,
        branches: p.branches,
        solver: c.junction_run.solver.clone(),
    }
}

fn weights_json(b: &BranchWeights) -> Value {
    json!({"angles": b.angles, "weights": b.weights, "residue": b.residue})
}

pub fn propagate_run(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let pk = &c.packet;
    let run = steer_run(c);
    let (dj, op, sd) = junction_setup(&c.junction, pk.theta, &run)?;
    let (xc, yc) = dj.center();
    let center = (xc + pk.packet.offset.0, yc + pk.packet.offset.1);
    let ep = edge_packet(&sd, &op, center, &pk.packet)?;
    let mut out = Outcome::default();
    let mut snaps = Csv::new(&["time", "norm", "energy", "angle_deg", "weight", "residue"]);
    let (nx, ny) = (op.grid.samples_along(0), op.grid.samples_along(1));
    let (mut norm_drift, mut energy_drift) = (0.0f64, 0.0f64);
    let mut frames = vec![];
    for (i, &t) in pk.times.iter().enumerate() {
        let psi = propagate(&sd, &ep.packet, t)?;
        let norm = psi.norm();
        let energy = expectation(&op, &psi.state);
        norm_drift = norm_drift.max((norm - ep.packet.norm()).abs());
        energy_drift = energy_drift.max((energy - ep.energy).abs());
        let bw = branch_weights(&op, &psi, &dj, &pk.branches);
        for (a, w) in bw.angles.iter().zip(&bw.weights) {
            snaps.row(row![t, norm, energy, *a, *w, bw.residue]);
        }
        // node index is x-major, so this is [x][y]
        out.artifacts
            .array(&format!("density_{i:03}.dmar"), &array(vec![nx, ny], op.density(&psi.state))?);
        frames.push(json!({"time": t, "norm": norm, "energy": energy, "branches": weights_json(&bw)}));
    }
    out.artifacts.csv("snapshots.csv", snaps);
    out.set("theta_m", pk.theta);
    out.set("captured", ep.captured);
    out.set("states", ep.states);
    out.set("probe_current", ep.current);
    out.set("norm_drift", norm_drift);
    out.set("energy_drift", energy_drift);
    out.set("frames", frames);
    out.stats.push(sd.stats.clone());
    out.require(norm_drift < pk.tol, format!("norm drift {norm_drift:.3e}"));
    out.require(energy_drift < pk.tol, format!("energy drift {energy_drift:.3e}"));
    Ok(out)
}

/// One steering case: weights at the last time and, if asked, `2πσ̃` on
/// the same decomposition.
pub struct SteerCase {
    pub theta_m: Option<f64>,
    pub initial: BranchWeights,
    pub last: BranchWeights,
    pub captured: f64,
    pub norm_drift: f64,
    pub energy_drift: f64,
    pub sigma: Option<f64>,
    pub stats: SolverStats,
}

pub fn steer_case(
    base: &DiracJunction,
    theta_m: Option<f64>,
    run: &SteerRun,
    jrun: &JunctionRun,
    sigma_x0: Option<f64>,
    times: &[f64],
) -> Result<SteerCase, CliError> {
    let (dj, op, sd) = junction_setup(base, theta_m, run)?;
    let (xc, yc) = dj.center();
    let center = (xc + run.packet.offset.0, yc + run.packet.offset.1);
    let ep = edge_packet(&sd, &op, center, &run.packet)?;
    let (mut norm_drift, mut energy_drift) = (0.0f64, 0.0f64);
    for &t in times.iter().chain([run.t].iter()) {
        let psi = propagate(&sd, &ep.packet, t)?;
        norm_drift = norm_drift.max((psi.norm() - ep.packet.norm()).abs());
        energy_drift = energy_drift.max((expectation(&op, &psi.state) - ep.energy).abs());
    }
    let psi: Wavepacket = propagate(&sd, &ep.packet, run.t)?;
    let sigma = match sigma_x0 {
        Some(x0) => Some(junction_values(&op, &sd, &[x0], jrun)?[0]),
        None => None,
    };
    Ok(SteerCase {
        theta_m,
        initial: branch_weights(&op, &ep.packet, &dj, &run.branches),
        last: branch_weights(&op, &psi, &dj, &run.branches),
        captured: ep.captured,
        norm_drift,
        energy_drift,
        sigma,
        stats: sd.stats.clone(),
    })
}

pub fn steer(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let pk = &c.packet;
    let run = steer_run(c);
    let x0 = pk.conductivity.then_some(0.5 * c.junction.lx);
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["theta_m", "angle_deg", "initial", "final"]);
    let mut sig = Csv::new(&["theta_m", "x0", "two_pi_sigma"]);
    let mut cases = vec![];
    let thetas: Vec<Option<f64>> = std::iter::once(None).chain(pk.theta_m.iter().map(|&t| Some(t))).collect();
    for th in thetas {
        let s = steer_case(&c.junction, th, &run, &c.junction_run, x0, &pk.times)?;
        let label = th.map_or("none".to_string(), |t| t.to_string());
        for ((a, wi), wf) in s.initial.angles.iter().zip(&s.initial.weights).zip(&s.last.weights) {
            csv.row(row![label.as_str(), *a, *wi, *wf]);
        }
        if let (Some(x0), Some(v)) = (x0, s.sigma) {
            sig.row(row![label.as_str(), x0, v]);
        }
        out.require(s.norm_drift < pk.tol, format!("{label}: norm drift {:.3e}", s.norm_drift));
        out.require(s.energy_drift < pk.tol, format!("{label}: energy drift {:.3e}", s.energy_drift));
        cases.push(json!({
            "theta_m": th,
            "t": run.t,
            "captured": s.captured,
            "norm_drift": s.norm_drift,
            "energy_drift": s.energy_drift,
            "initial": weights_json(&s.initial),
            "final": weights_json(&s.last),
            "two_pi_sigma": s.sigma,
        }));
        out.stats.push(s.stats);
    }
    out.artifacts.csv("branches.csv", csv);
    if x0.is_some() {
        out.artifacts.csv("steer_sigma.csv", sig);
    }
    out.set("cases", cases);
    Ok(out)
}

pub fn scatter1d(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = &c.scatter;
    let (v0, a) = (s.v0, s.a);
    let v = move |x: f64| if x.abs() < a { v0 } else { 0.0 };
    let mut out = Outcome::default();
    let mut csv = Csv::new(&[
        "x0", "k", "re_r", "im_r", "abs_t_sq", "sigma_plus", "sigma_minus", "v_at_split",
    ]);
    let mut checks = vec![];
    let mut unitarity = 0.0f64;
    for &k in &s.k {
        let pts = position_sweep(&v, -a, a, k, &s.x0, s.cells_per_unit)?;
        for p in &pts {
            let t = p.total;
            unitarity = unitarity.max(t.unitarity_defect());
            csv.row(row![
                p.x0,
                k,
                t.r_minus.re,
                t.r_minus.im,
                t.t_plus.norm_sqr(),
                p.split.sigma_plus,
                p.split.sigma_minus,
                p.v_at_split
            ]);
        }
        if let Some(p) = pts.first() {
            let err = closed_form_barrier(v0, a, k).ok().map(|r| (p.total.r_minus - r).norm());
            checks.push(json!({"k": k, "closed_form_err": err}));
            if let Some(e) = err {
                out.require(e < 1e-8, format!("k={k}: closed-form mismatch {e:.3e}"));
            }
        }
    }
    out.artifacts.csv("scatter.csv", csv);
    out.set("unitarity_defect", unitarity);
    out.set("checks", checks);
    out.require(unitarity < 1e-10, format!("unitarity defect {unitarity:.3e}"));
    Ok(out)
}
