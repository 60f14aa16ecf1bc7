use anyhow::{Context, Result};
use serde_json::{Map, Value};

use kg_galerkin::critical::{self, CriticalSearch};
use kg_galerkin::dynamics::Scheme;
use kg_galerkin::params::nondimensionalize;
use kg_galerkin::residual::{residual_report, DEFAULT_INTERVALS_PER_MODE};
use kg_galerkin::spectral::coupling;
use kg_galerkin::stationary::{self, BranchCount};
use kg_galerkin::{GridFunction, PhysicalParams, StateVector, TruncatedSystem};

use crate::args::*;
use crate::input::{self, InputError};
use crate::output::{report_written, Cell, Meta, Sink, Table};

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(input_err(msg()))
    }
}

/// Resolve `lambda` and record the physical inputs in `meta`.
fn resolve_lambda(p: &Physics, meta: &mut Meta) -> Result<f64> {
    let lambda = match (p.lambda, p.beta, p.phi0, p.ell) {
        (Some(l), None, None, None) => {
            require(l.is_finite(), || format!("lambda must be finite, got {l}"))?;
            l
        }
        (None, Some(beta), Some(phi0), Some(ell)) => {
            meta.num("beta", beta).num("phi0", phi0).num("ell", ell);
            nondimensionalize(&PhysicalParams::new(beta, phi0, ell))
                .map_err(|e| input_err(e.to_string()))?
                .lambda
        }
        _ => {
            return Err(input_err(
                "pass either --lambda or all of --beta, --phi0, --ell",
            ))
        }
    };
    meta.num("lambda", lambda);
    Ok(lambda)
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::from(x)).collect())
}

pub fn stationary(a: &StationaryArgs) -> Result<()> {
    let mut meta = Meta::new("stationary");
    let lambda = resolve_lambda(&a.physics, &mut meta)?;
    require(a.nmax >= 1, || "--nmax must be at least 1".into())?;
    let available = stationary::count_branches(lambda);
    let max = a.branches.unwrap_or(match available {
        BranchCount::Finite(c) => c,
        BranchCount::Unbounded => 3,
    });
    meta.push("nmax", a.nmax).push("branches", max);

    let solutions = if max == 0 || available == BranchCount::Finite(0) {
        Vec::new()
    } else {
        stationary::enumerate_solutions(lambda, max, a.nmax)?
    };
    if solutions.is_empty() {
        eprintln!("warning: no nontrivial stationary solutions for lambda = {lambda}");
    }

    let mut branches = Table::new([
        "label",
        "branch_n",
        "kind",
        "modulus",
        "wavenumber",
        "amplitude",
        "phase",
        "energy",
    ]);
    for s in &solutions {
        let b = &s.branch;
        branches.push(vec![
            s.label.into(),
            b.branch_n.into(),
            b.kind.as_str().into(),
            b.modulus.into(),
            b.wavenumber.into(),
            b.amplitude.into(),
            b.phase.into(),
            s.energy.into(),
        ]);
    }
    let mut coeffs =
        Table::new(std::iter::once("n".to_owned()).chain(numbered("solution", solutions.len())));
    for n in 1..=a.nmax {
        let mut row: Vec<Cell> = vec![n.into()];
        row.extend(solutions.iter().map(|s| Cell::from(s.coefficients.mode(n))));
        coeffs.push(row);
    }

    let mut sink = Sink::new(&a.output)?;
    sink.table("stationary_branches", &meta, &branches)?;
    sink.table("stationary_coefficients", &meta, &coeffs)?;
    for s in &solutions {
        println!(
            "{:>3}  n={:<3} {}  modulus={:.8}  energy={:.8}",
            s.label,
            s.branch.branch_n,
            s.branch.kind.as_str(),
            s.branch.modulus,
            s.energy
        );
    }
    report_written(sink.written());
    Ok(())
}

fn initial_state(a: &EvolveArgs) -> Result<StateVector> {
    if let Some(path) = &a.field {
        let u0 = input::read_field(path)?;
        let v0 = match &a.field_velocity {
            Some(p) => input::read_field(p)?,
            None => GridFunction::new(vec![0.0; u0.points()])?,
        };
        return kg_galerkin::dynamics::cauchy_from_field(&u0, &v0, a.n)
            .map_err(|e| input_err(format!("initial field: {e}")));
    }
    let c = input::parse_coefficients(&a.init)?;
    let positions = c
        .positions
        .ok_or_else(|| input_err("no initial data: pass --init \"A=...\" or --field"))?;
    let positions = input::pad("A", positions, a.n)?;
    let velocities = input::pad("V", c.velocities.unwrap_or_default(), a.n)?;
    Ok(StateVector::new(positions, velocities, 0.0)?)
}

pub fn evolve(a: &EvolveArgs) -> Result<()> {
    let mut meta = Meta::new("evolve");
    let lambda = resolve_lambda(&a.physics, &mut meta)?;
    require(a.n >= 1, || "--n must be at least 1".into())?;
    require(a.dt.is_finite() && a.dt > 0.0, || {
        format!("--dt must be positive, got {}", a.dt)
    })?;
    require(a.tmax.is_finite() && a.tmax > 0.0, || {
        format!("--tmax must be positive, got {}", a.tmax)
    })?;
    require(a.sample_every >= 1, || {
        "--sample-every must be at least 1".into()
    })?;
    let scheme = match a.scheme {
        SchemeArg::MinimumError => Scheme::MinimumError,
        SchemeArg::Verlet => Scheme::VelocityVerlet,
    };
    let s0 = initial_state(a)?;
    meta.push("n", a.n)
        .num("dt", a.dt)
        .num("tmax", a.tmax)
        .push("sample_every", a.sample_every)
        .push("scheme", scheme.as_str())
        .push("init", a.init.join(";"));
    if let Some(p) = &a.field {
        meta.push("field", p.display());
    }
    if let Some(p) = &a.field_velocity {
        meta.push("field_velocity", p.display());
    }

    let sys = TruncatedSystem::new(a.n, lambda);
    let traj = sys.integrate_with(&s0, a.tmax, a.dt, a.sample_every, scheme)?;

    let n = a.n;
    let mut table = Table::new(
        std::iter::once("tau".to_owned())
            .chain(numbered("A", n))
            .chain(numbered("V", n))
            .chain(std::iter::once("H".to_owned())),
    );
    for (s, &h) in traj.samples.iter().zip(&traj.hamiltonian) {
        let mut row: Vec<Cell> = vec![s.tau.into()];
        row.extend(s.positions.iter().map(|&x| Cell::from(x)));
        row.extend(s.velocities.iter().map(|&x| Cell::from(x)));
        row.push(h.into());
        table.push(row);
    }
    let last = traj.last();
    let mut state = Table::new(["n", "A", "V"]);
    for (i, (&x, &v)) in last.positions.iter().zip(&last.velocities).enumerate() {
        state.push(vec![(i + 1).into(), x.into(), v.into()]);
    }
    let mut state_meta = meta.clone();
    state_meta.num("tau", last.tau);

    let h0 = traj.hamiltonian[0];
    let h1 = *traj.hamiltonian.last().expect("nonempty trajectory");
    let mut summary = Map::new();
    summary.insert("lambda".into(), lambda.into());
    summary.insert("n_modes".into(), n.into());
    summary.insert("dt".into(), a.dt.into());
    summary.insert("scheme".into(), scheme.as_str().into());
    summary.insert("samples".into(), traj.samples.len().into());
    summary.insert("tau_final".into(), last.tau.into());
    summary.insert("hamiltonian_initial".into(), h0.into());
    summary.insert("hamiltonian_final".into(), h1.into());
    summary.insert("energy_drift".into(), traj.energy_drift().into());
    summary.insert("final_positions".into(), nums(&last.positions));
    summary.insert("final_velocities".into(), nums(&last.velocities));

    let mut sink = Sink::new(&a.output)?;
    sink.table("trajectory", &meta, &table)?;
    sink.csv("final_state", &state_meta, &state)?;
    sink.summary("evolve_summary", &meta, summary)?;
    println!(
        "tau = {:.6}  H(0) = {:.12e}  max |H - H(0)| = {:.3e}",
        last.tau,
        h0,
        traj.energy_drift()
    );
    report_written(sink.written());
    Ok(())
}

fn landscape_table(lambda: f64, g: &GridArgs) -> Result<Table> {
    require(g.range.is_finite() && g.range > 0.0, || {
        format!("--range must be positive, got {}", g.range)
    })?;
    require(g.resolution >= 2, || {
        "--resolution must be at least 2".into()
    })?;
    let l = critical::landscape_grid(
        lambda,
        (-g.range, g.range),
        (-g.range, g.range),
        g.resolution,
    )?;
    let mut t = Table::new(["A_1", "A_3", "U"]);
    for (i, &x) in l.a1.iter().enumerate() {
        for (j, &z) in l.a3.iter().enumerate() {
            t.push(vec![x.into(), z.into(), l.get(i, j).into()]);
        }
    }
    Ok(t)
}

pub fn critical(a: &CriticalArgs) -> Result<()> {
    let mut meta = Meta::new("critical");
    let lambda = resolve_lambda(&a.physics, &mut meta)?;
    require(a.n >= 1, || "--n must be at least 1".into())?;
    let search = CriticalSearch {
        seed: a.seed,
        draws: a.draws,
        ..CriticalSearch::default()
    };
    meta.push("n", a.n)
        .push("points", a.points)
        .push("seed", a.seed)
        .push("draws", a.draws)
        .num("spread", search.spread);
    let set = search.run(a.n, lambda, a.points)?;
    if set.points.is_empty() {
        eprintln!(
            "warning: no nontrivial critical points found for lambda = {lambda}, N = {}",
            a.n
        );
    }

    let mut table = Table::new(
        ["label", "U", "classification"]
            .into_iter()
            .map(str::to_owned)
            .chain(numbered("A", a.n))
            .chain(numbered("eig", a.n)),
    );
    for p in &set.points {
        let mut row: Vec<Cell> = vec![
            p.label.into(),
            p.u_value.into(),
            p.classification.as_str().into(),
        ];
        row.extend(p.positions.iter().map(|&x| Cell::from(x)));
        row.extend(p.hessian_eigenvalues.iter().map(|&x| Cell::from(x)));
        table.push(row);
    }

    let mut summary = Map::new();
    summary.insert("lambda".into(), lambda.into());
    summary.insert("n_modes".into(), a.n.into());
    summary.insert("seed".into(), a.seed.into());
    summary.insert("starts".into(), set.starts.into());
    summary.insert("reported".into(), set.points.len().into());
    summary.insert(
        "U".into(),
        nums(&set.points.iter().map(|p| p.u_value).collect::<Vec<_>>()),
    );
    match &set.trivial {
        Some(t) => {
            summary.insert("trivial_U".into(), t.u_value.into());
            summary.insert(
                "trivial_classification".into(),
                t.classification.as_str().into(),
            );
            summary.insert("trivial_eigenvalues".into(), nums(&t.hessian_eigenvalues));
        }
        None => {
            summary.insert("trivial_U".into(), Value::Null);
        }
    }

    let mut sink = Sink::new(&a.output)?;
    sink.table("critical_points", &meta, &table)?;
    sink.summary("critical_summary", &meta, summary)?;
    if a.landscape {
        let mut lmeta = meta.clone();
        lmeta
            .num("range", a.grid.range)
            .push("resolution", a.grid.resolution);
        sink.table("landscape", &lmeta, &landscape_table(lambda, &a.grid)?)?;
    }
    for p in &set.points {
        let coords: Vec<String> = p.positions.iter().map(|x| format!("{x:.6}")).collect();
        println!(
            "{:>3}  U={:<14.8} {:<10} A=({})",
            p.label,
            p.u_value,
            p.classification.as_str(),
            coords.join(", ")
        );
    }
    report_written(sink.written());
    Ok(())
}

pub fn landscape(a: &LandscapeArgs) -> Result<()> {
    let mut meta = Meta::new("landscape");
    let lambda = resolve_lambda(&a.physics, &mut meta)?;
    meta.num("range", a.grid.range)
        .push("resolution", a.grid.resolution);
    let table = landscape_table(lambda, &a.grid)?;
    let mut sink = Sink::new(&a.output)?;
    sink.table("landscape", &meta, &table)?;
    report_written(sink.written());
    Ok(())
}

pub fn residual(a: &ResidualArgs) -> Result<()> {
    let mut meta = Meta::new("residual");
    let (positions, velocities, tau) = match (&a.state, &a.state_file) {
        (Some(spec), None) => {
            meta.push("state", spec);
            let c = input::parse_coefficients(&[spec])?;
            let p = c
                .positions
                .ok_or_else(|| input_err("--state needs 'A=...'"))?;
            let v = c.velocities.unwrap_or_default();
            (p, v, 0.0)
        }
        (None, Some(path)) => {
            meta.push("state_file", path.display());
            let s = input::read_state(path)?;
            (s.positions, s.velocities, s.tau)
        }
        _ => return Err(input_err("pass either --state or --state-file")),
    };
    let n = a.n.unwrap_or(positions.len());
    require(n >= 1, || "--n must be at least 1".into())?;
    let positions = input::pad("A", positions, n)?;
    let velocities = input::pad("V", velocities, n)?;
    let intervals = a.grid.unwrap_or(DEFAULT_INTERVALS_PER_MODE * n);
    meta.push("n", n).push("grid", intervals).num("tau", tau);

    let state = StateVector::new(positions, velocities, tau)?;
    let report = residual_report(&state, intervals).map_err(|e| input_err(e.to_string()))?;

    let mut table = Table::new(["xi", "R_local"]);
    for (xi, r) in report.local.iter() {
        table.push(vec![xi.into(), r.into()]);
    }
    let mut summary = Map::new();
    summary.insert("total".into(), report.total.into());
    summary.insert("n_modes".into(), n.into());
    summary.insert("intervals".into(), intervals.into());
    summary.insert("tau".into(), tau.into());
    summary.insert("max_local".into(), report.local.max_abs().into());

    let mut sink = Sink::new(&a.output)?;
    sink.table("residual", &meta, &table)?;
    sink.summary("residual_summary", &meta, summary)?;
    println!("total residual = {:.16e}", report.total);
    report_written(sink.written());
    Ok(())
}

pub fn tensor(a: &TensorArgs) -> Result<()> {
    let mut meta = Meta::new("tensor");
    require(a.max_index >= 1, || "--max-index must be at least 1".into())?;
    meta.push("max_index", a.max_index);
    let m = a.max_index;
    let mut table = Table::new(["n", "m", "p", "q", "D"]);
    for n in 1..=m {
        for k in 1..=m {
            for p in 1..=m {
                for q in 1..=m {
                    let d: f64 = coupling(n, k, p, q);
                    if d != 0.0 {
                        table.push(vec![n.into(), k.into(), p.into(), q.into(), d.into()]);
                    }
                }
            }
        }
    }
    let mut sink = Sink::new(&a.output)?;
    sink.table("tensor", &meta, &table)
        .context("writing coupling table")?;
    println!("{} nonzero couplings with indices <= {m}", table.len());
    report_written(sink.written());
    Ok(())
}
